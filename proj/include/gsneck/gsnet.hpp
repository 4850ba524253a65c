#pragma once

#include <optional>

#include "gsneck/tape.hpp"

namespace gsneck {

struct GsnetConfig {
    int channels = 256;
    int k = 15;               // combined-convolution extent, odd
    bool depthwise = true;    // groups = channels on the asymmetric convs
    int residual_kernel = 1;  // kernel of both residual convs, 1 or 3
    int residual_channels = 256;
    bool bias_asym = true;
    bool bias_residual = true;
    bool share_branch_weights = false;

    void validate() const {
        if (channels < 1) throw ConfigError("gsnet channels must be >= 1");
        if (k < 3 || k % 2 == 0)
            throw ConfigError("gsnet k must be odd and >= 3, got " + std::to_string(k));
        if (residual_kernel != 1 && residual_kernel != 3)
            throw ConfigError("gsnet residual_kernel must be 1 or 3");
        if (residual_channels < 1) throw ConfigError("gsnet residual_channels must be >= 1");
    }

    int asym_groups() const { return depthwise ? channels : 1; }
    ConvSpec row_spec() const { return ConvSpec::same(channels, channels, 1, k, asym_groups(), bias_asym); }
    ConvSpec col_spec() const { return ConvSpec::same(channels, channels, k, 1, asym_groups(), bias_asym); }
    ConvSpec res1_spec() const {
        return ConvSpec::same(channels, residual_channels, residual_kernel, residual_kernel, 1, bias_residual);
    }
    ConvSpec res2_spec() const {
        return ConvSpec::same(residual_channels, channels, residual_kernel, residual_kernel, 1, bias_residual);
    }
};

template <class T>
struct ConvLayer {
    Tensor<T> w;
    std::optional<Tensor<T>> b;
};

template <class T>
ConvLayer<T> init_conv_layer(const ConvSpec& spec, uint64_t seed) {
    const double fan_in = static_cast<double>(spec.in_ch / spec.groups) * spec.kernel_h * spec.kernel_w;
    const T s = static_cast<T>(1.0 / std::sqrt(fan_in));
    ConvLayer<T> layer;
    layer.w = Tensor<T>::uniform(spec.weight_shape(), mix_seed(seed, 0), -s, s);
    if (spec.has_bias) layer.b = Tensor<T>::uniform(spec.bias_shape(), mix_seed(seed, 1), -s, s);
    return layer;
}

template <class T>
struct GsnetParams {
    ConvLayer<T> a1, a2; // branch A: 1xk then kx1
    ConvLayer<T> b1, b2; // branch B: kx1 then 1xk
    ConvLayer<T> r1, r2; // residual: conv -> relu -> conv
};

template <class T>
GsnetParams<T> gsnet_init(const GsnetConfig& cfg, uint64_t seed) {
    cfg.validate();
    GsnetParams<T> p;
    p.a1 = init_conv_layer<T>(cfg.row_spec(), mix_seed(seed, 11));
    p.a2 = init_conv_layer<T>(cfg.col_spec(), mix_seed(seed, 12));
    if (cfg.share_branch_weights) {
        // branch B reuses branch A kernels rotated between row and column form
        p.b1.w = transpose_hw(p.a1.w);
        p.b1.b = p.a1.b;
        p.b2.w = transpose_hw(p.a2.w);
        p.b2.b = p.a2.b;
    } else {
        p.b1 = init_conv_layer<T>(cfg.col_spec(), mix_seed(seed, 13));
        p.b2 = init_conv_layer<T>(cfg.row_spec(), mix_seed(seed, 14));
    }
    p.r1 = init_conv_layer<T>(cfg.res1_spec(), mix_seed(seed, 15));
    p.r2 = init_conv_layer<T>(cfg.res2_spec(), mix_seed(seed, 16));
    return p;
}

template <class T>
GsnetParams<T> gsnet_zero_params(const GsnetConfig& cfg) {
    cfg.validate();
    auto zero = [](const ConvSpec& s) {
        ConvLayer<T> l;
        l.w = Tensor<T>::zeros(s.weight_shape());
        if (s.has_bias) l.b = Tensor<T>::zeros(s.bias_shape());
        return l;
    };
    GsnetParams<T> p;
    p.a1 = zero(cfg.row_spec());
    p.a2 = zero(cfg.col_spec());
    p.b1 = zero(cfg.col_spec());
    p.b2 = zero(cfg.row_spec());
    p.r1 = zero(cfg.res1_spec());
    p.r2 = zero(cfg.res2_spec());
    return p;
}

struct ConvLayerIds {
    ValueId w = kNoValue;
    ValueId b = kNoValue;
};

struct GsnetParamIds {
    ConvLayerIds a1, a2, b1, b2, r1, r2;
};

template <class T>
ConvLayerIds register_conv_layer(Tape<T>& tape, const ConvLayer<T>& layer) {
    ConvLayerIds ids;
    ids.w = tape.leaf(layer.w);
    if (layer.b) ids.b = tape.leaf(*layer.b);
    return ids;
}

template <class T>
GsnetParamIds gsnet_register(Tape<T>& tape, const GsnetParams<T>& p) {
    GsnetParamIds ids;
    ids.a1 = register_conv_layer(tape, p.a1);
    ids.a2 = register_conv_layer(tape, p.a2);
    ids.b1 = register_conv_layer(tape, p.b1);
    ids.b2 = register_conv_layer(tape, p.b2);
    ids.r1 = register_conv_layer(tape, p.r1);
    ids.r2 = register_conv_layer(tape, p.r2);
    return ids;
}

// M = (kx1 . 1xk)(X) + (1xk . kx1)(X) — the bilateral scan, linear end to end.
template <class T>
ValueId combined_conv_node(Tape<T>& tape, ValueId x, const GsnetParamIds& ids,
                           const GsnetConfig& cfg) {
    const ConvSpec row = cfg.row_spec(), col = cfg.col_spec();
    ValueId a = tape.conv2d(tape.conv2d(x, row, ids.a1.w, ids.a1.b), col, ids.a2.w, ids.a2.b);
    ValueId b = tape.conv2d(tape.conv2d(x, col, ids.b1.w, ids.b1.b), row, ids.b2.w, ids.b2.b);
    return tape.add(a, b);
}

// R(M) = conv(relu(conv(M)))
template <class T>
ValueId boundary_refine_node(Tape<T>& tape, ValueId m, const GsnetParamIds& ids,
                             const GsnetConfig& cfg) {
    ValueId h = tape.relu(tape.conv2d(m, cfg.res1_spec(), ids.r1.w, ids.r1.b));
    return tape.conv2d(h, cfg.res2_spec(), ids.r2.w, ids.r2.b);
}

// Y = M + R(M) + X
template <class T>
ValueId gsnet_forward_node(Tape<T>& tape, ValueId x, const GsnetParamIds& ids,
                           const GsnetConfig& cfg) {
    ValueId m = combined_conv_node(tape, x, ids, cfg);
    ValueId r = boundary_refine_node(tape, m, ids, cfg);
    return tape.add(tape.add(m, r), x);
}

template <class T>
Tensor<T> combined_conv(const Tensor<T>& x, const GsnetParams<T>& p, const GsnetConfig& cfg) {
    Tape<T> tape;
    ValueId xid = tape.leaf(x);
    return tape.value(combined_conv_node(tape, xid, gsnet_register(tape, p), cfg));
}

template <class T>
Tensor<T> boundary_refine(const Tensor<T>& m, const GsnetParams<T>& p, const GsnetConfig& cfg) {
    Tape<T> tape;
    ValueId mid = tape.leaf(m);
    return tape.value(boundary_refine_node(tape, mid, gsnet_register(tape, p), cfg));
}

template <class T>
Tensor<T> gsnet_forward(const Tensor<T>& x, const GsnetParams<T>& p, const GsnetConfig& cfg) {
    Tape<T> tape;
    ValueId xid = tape.leaf(x);
    return tape.value(gsnet_forward_node(tape, xid, gsnet_register(tape, p), cfg));
}

} // namespace gsneck
