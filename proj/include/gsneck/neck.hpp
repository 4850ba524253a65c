#pragma once

#include <vector>

#include "gsneck/frm.hpp"
#include "gsneck/gsnet.hpp"

namespace gsneck {

struct PyramidSpec {
    int levels = 4;
    int base_h = 64, base_w = 64;    // finest level
    std::vector<int> channels{};     // one entry, or one per level
    int finest_stride = 4;

    void validate() const {
        if (levels < 2) throw ConfigError("pyramid needs at least 2 levels");
        if (base_h < 1 || base_w < 1) throw ConfigError("pyramid base size must be >= 1");
        if (finest_stride < 1) throw ConfigError("pyramid finest_stride must be >= 1");
        if (channels.empty()) throw ConfigError("pyramid channels unset");
        if (channels.size() != 1 && channels.size() != static_cast<size_t>(levels))
            throw ConfigError("pyramid channels must list 1 or `levels` entries");
        for (int c : channels)
            if (c < 1) throw ConfigError("pyramid channels must be >= 1");
        const int div = 1 << (levels - 1);
        if (base_h % div != 0 || base_w % div != 0)
            throw ConfigError("pyramid base size must be divisible by 2^(levels-1)");
    }

    int channel_at(int level) const {
        return channels.size() == 1 ? channels[0] : channels[static_cast<size_t>(level)];
    }
    int h_at(int level) const { return base_h >> level; }
    int w_at(int level) const { return base_w >> level; }
    int stride_at(int level) const { return finest_stride << level; }
};

template <class T>
struct PyramidFeatures {
    std::vector<Tensor<T>> levels;
    std::vector<int> strides;
};

enum class FillKind { Uniform, Impulse, Ramp };

// Deterministic stand-in for a backbone; `impulse` puts a single 1.0 at each
// level's center (channel 0) for receptive-field studies.
template <class T>
PyramidFeatures<T> synth_backbone(const PyramidSpec& spec, uint64_t seed, FillKind fill) {
    spec.validate();
    PyramidFeatures<T> out;
    for (int i = 0; i < spec.levels; ++i) {
        const Shape4 s{1, spec.channel_at(i), spec.h_at(i), spec.w_at(i)};
        Tensor<T> t;
        switch (fill) {
            case FillKind::Uniform:
                t = Tensor<T>::uniform(s, mix_seed(seed, 100 + i), T(-1), T(1));
                break;
            case FillKind::Impulse:
                t = Tensor<T>::zeros(s);
                t.at(0, 0, s.h / 2, s.w / 2) = T(1);
                break;
            case FillKind::Ramp: {
                t = Tensor<T>(s);
                const int64_t n = t.numel();
                for (int64_t j = 0; j < n; ++j)
                    t[j] = static_cast<T>(static_cast<double>(j) / static_cast<double>(n));
                break;
            }
        }
        out.levels.push_back(std::move(t));
        out.strides.push_back(spec.stride_at(i));
    }
    return out;
}

enum class TopLevelPolicy { Passthrough, Project1x1 };

struct NeckConfig {
    PyramidSpec pyramid{};
    GsnetConfig gsnet{};
    FrmConfig frm{};
    TopLevelPolicy top_level_policy = TopLevelPolicy::Passthrough;
    bool gsnet_global_kernel = false;
    int lateral_channels = 256; // baseline FPN width

    // GSNet at a level; with the global-kernel option k covers the level extent
    GsnetConfig gsnet_at(int level) const {
        GsnetConfig g = gsnet;
        g.channels = pyramid.channel_at(level);
        if (gsnet_global_kernel) {
            const int ext = std::max(pyramid.h_at(level), pyramid.w_at(level));
            g.k = 2 * ((ext + 1) / 2) + 1;
        }
        return g;
    }

    FrmConfig frm_at(int level) const {
        FrmConfig f = frm;
        f.in_ch_x = pyramid.channel_at(level);
        f.in_ch_y = pyramid.channel_at(level);
        return f;
    }

    ConvSpec top_proj_spec() const {
        const int c = pyramid.channel_at(pyramid.levels - 1);
        return ConvSpec::same(c, frm.out_ch, 1, 1, 1, frm.has_bias);
    }

    void validate() const {
        pyramid.validate();
        gsnet.validate();
        frm.validate();
        if (lateral_channels < 1) throw ConfigError("lateral_channels must be >= 1");
        // FRM concatenates X_i, Y_i and upsampled Y_{i+1}: adjacent levels must agree
        for (int i = 0; i + 1 < pyramid.levels; ++i)
            if (pyramid.channel_at(i) != pyramid.channel_at(i + 1))
                throw ConfigError("adjacent pyramid levels must share a channel count for FRM");
        for (int i = 0; i < pyramid.levels; ++i) gsnet_at(i).validate();
        for (int i = 0; i + 1 < pyramid.levels; ++i) frm_at(i).validate();
    }
};

template <class T>
struct BaselineFpnParams {
    std::vector<ConvLayer<T>> lateral; // 1x1 per level
    std::vector<ConvLayer<T>> smooth;  // 3x3 per level
};

template <class T>
struct NeckParams {
    std::vector<GsnetParams<T>> gsnet;          // one per level
    std::vector<FrmParams<T>> frm;              // one per fused level (0..L-2)
    std::optional<ConvLayer<T>> top_proj;       // Project1x1 policy only
    BaselineFpnParams<T> baseline;
};

template <class T>
NeckParams<T> neck_init(const NeckConfig& cfg, uint64_t seed) {
    cfg.validate();
    NeckParams<T> p;
    const int L = cfg.pyramid.levels;
    for (int i = 0; i < L; ++i)
        p.gsnet.push_back(gsnet_init<T>(cfg.gsnet_at(i), mix_seed(seed, 1000 + i)));
    for (int i = 0; i + 1 < L; ++i)
        p.frm.push_back(frm_init<T>(cfg.frm_at(i), mix_seed(seed, 2000 + i)));
    if (cfg.top_level_policy == TopLevelPolicy::Project1x1)
        p.top_proj = init_conv_layer<T>(cfg.top_proj_spec(), mix_seed(seed, 3000));
    for (int i = 0; i < L; ++i) {
        const ConvSpec lat = ConvSpec::same(cfg.pyramid.channel_at(i), cfg.lateral_channels, 1, 1);
        const ConvSpec sm = ConvSpec::same(cfg.lateral_channels, cfg.lateral_channels, 3, 3);
        p.baseline.lateral.push_back(init_conv_layer<T>(lat, mix_seed(seed, 4000 + i)));
        p.baseline.smooth.push_back(init_conv_layer<T>(sm, mix_seed(seed, 5000 + i)));
    }
    return p;
}

template <class T>
NeckParams<T> neck_zero_params(const NeckConfig& cfg) {
    cfg.validate();
    NeckParams<T> p;
    const int L = cfg.pyramid.levels;
    for (int i = 0; i < L; ++i) p.gsnet.push_back(gsnet_zero_params<T>(cfg.gsnet_at(i)));
    for (int i = 0; i + 1 < L; ++i) p.frm.push_back(frm_zero_params<T>(cfg.frm_at(i)));
    if (cfg.top_level_policy == TopLevelPolicy::Project1x1) {
        ConvLayer<T> l;
        const ConvSpec s = cfg.top_proj_spec();
        l.w = Tensor<T>::zeros(s.weight_shape());
        if (s.has_bias) l.b = Tensor<T>::zeros(s.bias_shape());
        p.top_proj = l;
    }
    for (int i = 0; i < L; ++i) {
        const ConvSpec lat = ConvSpec::same(cfg.pyramid.channel_at(i), cfg.lateral_channels, 1, 1);
        const ConvSpec sm = ConvSpec::same(cfg.lateral_channels, cfg.lateral_channels, 3, 3);
        ConvLayer<T> a, b;
        a.w = Tensor<T>::zeros(lat.weight_shape());
        a.b = Tensor<T>::zeros(lat.bias_shape());
        b.w = Tensor<T>::zeros(sm.weight_shape());
        b.b = Tensor<T>::zeros(sm.bias_shape());
        p.baseline.lateral.push_back(std::move(a));
        p.baseline.smooth.push_back(std::move(b));
    }
    return p;
}

struct NeckTapeIds {
    std::vector<ValueId> inputs;
    std::vector<ValueId> gsnet_out; // Y_i
    std::vector<ValueId> outputs;   // Z_0..Z_{L-2}, top
    std::vector<GsnetParamIds> gsnet_params;
    std::vector<FrmParamIds> frm_params;
    ConvLayerIds top_proj;
};

// Fig-2 wiring over pre-registered parameter ids: Y_i = gsnet(X_i) per level,
// Z_i = frm(X_i, Y_i, Y_{i+1}) for i < L-1, top level per policy.
template <class T>
NeckTapeIds enhanced_neck_wire(Tape<T>& tape, const std::vector<ValueId>& inputs,
                               const NeckConfig& cfg, std::vector<GsnetParamIds> gsnet_ids,
                               std::vector<FrmParamIds> frm_ids, ConvLayerIds top_proj_ids) {
    cfg.validate();
    const int L = cfg.pyramid.levels;
    if (static_cast<int>(inputs.size()) != L)
        throw ShapeError("enhanced neck expects " + std::to_string(L) + " levels, got " +
                         std::to_string(inputs.size()));
    NeckTapeIds ids;
    ids.inputs = inputs;
    ids.gsnet_params = std::move(gsnet_ids);
    ids.frm_params = std::move(frm_ids);
    ids.top_proj = top_proj_ids;
    for (int i = 0; i < L; ++i)
        ids.gsnet_out.push_back(gsnet_forward_node(tape, inputs[static_cast<size_t>(i)],
                                                   ids.gsnet_params[static_cast<size_t>(i)],
                                                   cfg.gsnet_at(i)));
    for (int i = 0; i + 1 < L; ++i)
        ids.outputs.push_back(frm_forward_node(tape, inputs[static_cast<size_t>(i)],
                                               ids.gsnet_out[static_cast<size_t>(i)],
                                               ids.gsnet_out[static_cast<size_t>(i + 1)],
                                               ids.frm_params[static_cast<size_t>(i)],
                                               cfg.frm_at(i)));
    ValueId top = ids.gsnet_out.back();
    if (cfg.top_level_policy == TopLevelPolicy::Project1x1)
        top = tape.conv2d(top, cfg.top_proj_spec(), ids.top_proj.w, ids.top_proj.b);
    ids.outputs.push_back(top);
    return ids;
}

template <class T>
NeckTapeIds enhanced_neck_nodes(Tape<T>& tape, const std::vector<ValueId>& inputs,
                                const NeckConfig& cfg, const NeckParams<T>& params) {
    cfg.validate();
    const int L = cfg.pyramid.levels;
    std::vector<GsnetParamIds> gids;
    std::vector<FrmParamIds> fids;
    ConvLayerIds tids;
    for (int i = 0; i < L; ++i)
        gids.push_back(gsnet_register(tape, params.gsnet[static_cast<size_t>(i)]));
    for (int i = 0; i + 1 < L; ++i)
        fids.push_back(frm_register(tape, params.frm[static_cast<size_t>(i)]));
    if (cfg.top_level_policy == TopLevelPolicy::Project1x1)
        tids = register_conv_layer(tape, *params.top_proj);
    return enhanced_neck_wire(tape, inputs, cfg, std::move(gids), std::move(fids), tids);
}

template <class T>
PyramidFeatures<T> enhanced_neck_forward(const PyramidFeatures<T>& feats, const NeckConfig& cfg,
                                         const NeckParams<T>& params) {
    Tape<T> tape;
    std::vector<ValueId> in;
    for (const auto& t : feats.levels) in.push_back(tape.leaf(t));
    NeckTapeIds ids = enhanced_neck_nodes(tape, in, cfg, params);
    PyramidFeatures<T> out;
    for (ValueId v : ids.outputs) out.levels.push_back(tape.value(v));
    out.strides = feats.strides;
    return out;
}

// 1x1 lateral + top-down upsampled sum + 3x3 smoothing, for comparison runs
template <class T>
std::vector<ValueId> baseline_fpn_nodes(Tape<T>& tape, const std::vector<ValueId>& inputs,
                                        const NeckConfig& cfg, const BaselineFpnParams<T>& params) {
    const int L = static_cast<int>(inputs.size());
    std::vector<ValueId> lat(static_cast<size_t>(L));
    for (int i = 0; i < L; ++i) {
        const ConvSpec spec = ConvSpec::same(static_cast<int>(tape.value(inputs[i]).shape().c),
                                             cfg.lateral_channels, 1, 1);
        ConvLayerIds lids = register_conv_layer(tape, params.lateral[static_cast<size_t>(i)]);
        lat[static_cast<size_t>(i)] = tape.conv2d(inputs[static_cast<size_t>(i)], spec, lids.w, lids.b);
    }
    std::vector<ValueId> merged(static_cast<size_t>(L));
    merged[static_cast<size_t>(L - 1)] = lat[static_cast<size_t>(L - 1)];
    const UpsampleSpec up{2, UpsampleMode::Nearest};
    for (int i = L - 2; i >= 0; --i)
        merged[static_cast<size_t>(i)] =
            tape.add(lat[static_cast<size_t>(i)], tape.upsample(merged[static_cast<size_t>(i + 1)], up));
    std::vector<ValueId> out(static_cast<size_t>(L));
    const ConvSpec sm = ConvSpec::same(cfg.lateral_channels, cfg.lateral_channels, 3, 3);
    for (int i = 0; i < L; ++i) {
        ConvLayerIds sids = register_conv_layer(tape, params.smooth[static_cast<size_t>(i)]);
        out[static_cast<size_t>(i)] = tape.conv2d(merged[static_cast<size_t>(i)], sm, sids.w, sids.b);
    }
    return out;
}

template <class T>
PyramidFeatures<T> baseline_fpn_forward(const PyramidFeatures<T>& feats, const NeckConfig& cfg,
                                        const BaselineFpnParams<T>& params) {
    Tape<T> tape;
    std::vector<ValueId> in;
    for (const auto& t : feats.levels) in.push_back(tape.leaf(t));
    std::vector<ValueId> outs = baseline_fpn_nodes(tape, in, cfg, params);
    PyramidFeatures<T> out;
    for (ValueId v : outs) out.levels.push_back(tape.value(v));
    out.strides = feats.strides;
    return out;
}

} // namespace gsneck
