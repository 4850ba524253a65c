#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gsneck/nn_ops.hpp"
#include "gsneck/tensor.hpp"

namespace gsneck {

using ValueId = int32_t;
inline constexpr ValueId kNoValue = -1;

enum class OpKind { Add, Relu, TransposeHW, Conv2d, Concat, Upsample };

struct TapeNode {
    OpKind kind;
    std::vector<ValueId> inputs; // for Conv2d: {x, w, b?}
    ValueId out = kNoValue;
    ConvSpec conv{};
    UpsampleSpec up{};
};

template <class T>
class GradientSet {
public:
    explicit GradientSet(std::vector<std::optional<Tensor<T>>> grads,
                         std::vector<Shape4> shapes)
        : grads_(std::move(grads)), shapes_(std::move(shapes)) {}

    // zero tensor for leaves the target never reached
    Tensor<T> grad(ValueId id) const {
        if (id < 0 || id >= static_cast<ValueId>(grads_.size()))
            throw LookupError("gradient for unknown value id " + std::to_string(id));
        if (grads_[static_cast<size_t>(id)]) return *grads_[static_cast<size_t>(id)];
        return Tensor<T>::zeros(shapes_[static_cast<size_t>(id)]);
    }

    bool reached(ValueId id) const {
        return id >= 0 && id < static_cast<ValueId>(grads_.size()) &&
               grads_[static_cast<size_t>(id)].has_value();
    }

private:
    std::vector<std::optional<Tensor<T>>> grads_;
    std::vector<Shape4> shapes_;
};

// Records an eager forward computation; backward walks the nodes in reverse.
// Single-writer while recording; backward over a finished tape is read-only.
template <class T>
class Tape {
public:
    ValueId leaf(Tensor<T> v) {
        values_.push_back(std::move(v));
        return static_cast<ValueId>(values_.size() - 1);
    }

    ValueId add(ValueId a, ValueId b) {
        Tensor<T> out = elementwise_add(value(a), value(b));
        return record({OpKind::Add, {a, b}}, std::move(out));
    }

    ValueId relu(ValueId a) {
        Tensor<T> out = gsneck::relu(value(a));
        return record({OpKind::Relu, {a}}, std::move(out));
    }

    ValueId transpose_hw(ValueId a) {
        Tensor<T> out = gsneck::transpose_hw(value(a));
        return record({OpKind::TransposeHW, {a}}, std::move(out));
    }

    ValueId conv2d(ValueId x, const ConvSpec& spec, ValueId w, ValueId b = kNoValue) {
        const Tensor<T>* bias = spec.has_bias ? &value(b) : nullptr;
        Tensor<T> out = gsneck::conv2d(value(x), spec, value(w), bias);
        TapeNode node{OpKind::Conv2d, {x, w}};
        if (spec.has_bias) node.inputs.push_back(b);
        node.conv = spec;
        return record(std::move(node), std::move(out));
    }

    ValueId concat(const std::vector<ValueId>& parts) {
        std::vector<Tensor<T>> vals;
        vals.reserve(parts.size());
        for (ValueId p : parts) vals.push_back(value(p));
        Tensor<T> out = concat_channels(vals);
        return record({OpKind::Concat, parts}, std::move(out));
    }

    ValueId upsample(ValueId a, const UpsampleSpec& spec) {
        Tensor<T> out = gsneck::upsample(value(a), spec);
        TapeNode node{OpKind::Upsample, {a}};
        node.up = spec;
        return record(std::move(node), std::move(out));
    }

    const Tensor<T>& value(ValueId id) const {
        if (id < 0 || id >= static_cast<ValueId>(values_.size()))
            throw LookupError("unknown value id " + std::to_string(id));
        return values_[static_cast<size_t>(id)];
    }

    size_t num_values() const { return values_.size(); }
    const std::vector<TapeNode>& nodes() const { return nodes_; }

    // Re-runs every recorded node from its stored inputs; true iff all recorded
    // outputs are reproduced bit-exactly.
    bool replay_bitexact() const {
        for (const TapeNode& n : nodes_) {
            Tensor<T> redo = eval_node(n);
            if (!redo.bit_equal(value(n.out))) return false;
        }
        return true;
    }

    // Sign pattern of every ReLU input; used by gradcheck to detect kink crossings.
    std::vector<uint8_t> relu_sign_pattern() const {
        std::vector<uint8_t> pat;
        for (const TapeNode& n : nodes_) {
            if (n.kind != OpKind::Relu) continue;
            const Tensor<T>& x = value(n.inputs[0]);
            for (int64_t i = 0; i < x.numel(); ++i) pat.push_back(x[i] > T(0) ? 1 : 0);
        }
        return pat;
    }

    // d(sum(seed .* target)) / d(every reachable value)
    GradientSet<T> backward(ValueId target, const Tensor<T>& seed) const {
        const Tensor<T>& tgt = value(target);
        if (!(seed.shape() == tgt.shape()))
            throw ShapeError("backward seed " + seed.shape().str() + " vs target " +
                             tgt.shape().str());
        std::vector<std::optional<Tensor<T>>> grads(values_.size());
        grads[static_cast<size_t>(target)] = seed;

        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
            const TapeNode& n = *it;
            auto& og = grads[static_cast<size_t>(n.out)];
            if (!og) continue;
            const Tensor<T>& dout = *og;
            switch (n.kind) {
                case OpKind::Add:
                    accumulate(grads, n.inputs[0], dout);
                    accumulate(grads, n.inputs[1], dout);
                    break;
                case OpKind::Relu:
                    accumulate(grads, n.inputs[0], relu_backward(value(n.inputs[0]), dout));
                    break;
                case OpKind::TransposeHW:
                    accumulate(grads, n.inputs[0], gsneck::transpose_hw(dout));
                    break;
                case OpKind::Conv2d: {
                    ConvGrads<T> g =
                        conv2d_backward(value(n.inputs[0]), n.conv, value(n.inputs[1]), dout);
                    accumulate(grads, n.inputs[0], std::move(g.dx));
                    accumulate(grads, n.inputs[1], std::move(g.dw));
                    if (n.conv.has_bias) accumulate(grads, n.inputs[2], std::move(*g.db));
                    break;
                }
                case OpKind::Concat: {
                    int64_t off = 0;
                    for (ValueId p : n.inputs) {
                        const int64_t pc = value(p).shape().c;
                        accumulate(grads, p, slice_channels(dout, off, off + pc));
                        off += pc;
                    }
                    break;
                }
                case OpKind::Upsample:
                    accumulate(grads, n.inputs[0],
                               upsample_backward(value(n.inputs[0]).shape(), n.up, dout));
                    break;
            }
        }
        std::vector<Shape4> shapes;
        shapes.reserve(values_.size());
        for (const auto& v : values_) shapes.push_back(v.shape());
        return GradientSet<T>(std::move(grads), std::move(shapes));
    }

private:
    ValueId record(TapeNode node, Tensor<T> out) {
        values_.push_back(std::move(out));
        node.out = static_cast<ValueId>(values_.size() - 1);
        nodes_.push_back(std::move(node));
        return nodes_.back().out;
    }

    Tensor<T> eval_node(const TapeNode& n) const {
        switch (n.kind) {
            case OpKind::Add: return elementwise_add(value(n.inputs[0]), value(n.inputs[1]));
            case OpKind::Relu: return gsneck::relu(value(n.inputs[0]));
            case OpKind::TransposeHW: return gsneck::transpose_hw(value(n.inputs[0]));
            case OpKind::Conv2d: {
                const Tensor<T>* bias = n.conv.has_bias ? &value(n.inputs[2]) : nullptr;
                return gsneck::conv2d(value(n.inputs[0]), n.conv, value(n.inputs[1]), bias);
            }
            case OpKind::Concat: {
                std::vector<Tensor<T>> vals;
                for (ValueId p : n.inputs) vals.push_back(value(p));
                return concat_channels(vals);
            }
            case OpKind::Upsample: return gsneck::upsample(value(n.inputs[0]), n.up);
        }
        throw LookupError("unknown op kind");
    }

    static void accumulate(std::vector<std::optional<Tensor<T>>>& grads, ValueId id,
                           Tensor<T> g) {
        auto& slot = grads[static_cast<size_t>(id)];
        if (!slot)
            slot = std::move(g);
        else
            slot = elementwise_add(*slot, g);
    }

    std::vector<Tensor<T>> values_;
    std::vector<TapeNode> nodes_;
};

} // namespace gsneck
