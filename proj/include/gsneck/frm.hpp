#pragma once

#include <array>

#include "gsneck/gsnet.hpp" // ConvLayer / ConvLayerIds helpers
#include "gsneck/tape.hpp"

namespace gsneck {

// Z = f1x1(f3x3(f1x1(f3x3(f1x1([X_i, Y_i, up(Y_{i+1})])))))
struct FrmConfig {
    int in_ch_x = 256;
    int in_ch_y = 256; // channels of Y_i and Y_{i+1}
    int mid_ch = 256;
    int out_ch = 256;
    UpsampleSpec upsample{2, UpsampleMode::Bilinear};
    bool has_bias = true;
    bool literal_eq4 = false; // true: no activations; false: ReLU after all but the last layer

    void validate() const {
        if (in_ch_x < 1 || in_ch_y < 1) throw ConfigError("frm input channels must be >= 1");
        if (mid_ch < 1) throw ConfigError("frm mid_ch must be >= 1");
        if (out_ch < 1) throw ConfigError("frm out_ch must be >= 1");
        upsample.validate();
    }

    int concat_ch() const { return in_ch_x + 2 * in_ch_y; }

    std::array<ConvSpec, 5> layer_specs() const {
        return {ConvSpec::same(concat_ch(), mid_ch, 1, 1, 1, has_bias),
                ConvSpec::same(mid_ch, mid_ch, 3, 3, 1, has_bias),
                ConvSpec::same(mid_ch, mid_ch, 1, 1, 1, has_bias),
                ConvSpec::same(mid_ch, mid_ch, 3, 3, 1, has_bias),
                ConvSpec::same(mid_ch, out_ch, 1, 1, 1, has_bias)};
    }
};

template <class T>
struct FrmParams {
    std::array<ConvLayer<T>, 5> layers;
};

template <class T>
FrmParams<T> frm_init(const FrmConfig& cfg, uint64_t seed) {
    cfg.validate();
    FrmParams<T> p;
    const auto specs = cfg.layer_specs();
    for (size_t i = 0; i < specs.size(); ++i)
        p.layers[i] = init_conv_layer<T>(specs[i], mix_seed(seed, 21 + i));
    return p;
}

template <class T>
FrmParams<T> frm_zero_params(const FrmConfig& cfg) {
    cfg.validate();
    FrmParams<T> p;
    const auto specs = cfg.layer_specs();
    for (size_t i = 0; i < specs.size(); ++i) {
        p.layers[i].w = Tensor<T>::zeros(specs[i].weight_shape());
        if (specs[i].has_bias) p.layers[i].b = Tensor<T>::zeros(specs[i].bias_shape());
    }
    return p;
}

struct FrmParamIds {
    std::array<ConvLayerIds, 5> layers;
};

template <class T>
FrmParamIds frm_register(Tape<T>& tape, const FrmParams<T>& p) {
    FrmParamIds ids;
    for (size_t i = 0; i < p.layers.size(); ++i)
        ids.layers[i] = register_conv_layer(tape, p.layers[i]);
    return ids;
}

template <class T>
ValueId frm_forward_node(Tape<T>& tape, ValueId x_i, ValueId y_i, ValueId y_next,
                         const FrmParamIds& ids, const FrmConfig& cfg) {
    cfg.validate();
    const Shape4& xs = tape.value(x_i).shape();
    const Shape4& ys = tape.value(y_i).shape();
    if (xs.n != ys.n || xs.h != ys.h || xs.w != ys.w)
        throw ShapeError("frm X_i " + xs.str() + " vs Y_i " + ys.str());
    ValueId up = tape.upsample(y_next, cfg.upsample);
    const Shape4& us = tape.value(up).shape();
    if (us.h != xs.h || us.w != xs.w)
        throw ShapeError("frm upsampled Y_{i+1} " + us.str() + " misaligned with X_i " + xs.str());

    ValueId v = tape.concat({x_i, y_i, up});
    const auto specs = cfg.layer_specs();
    for (size_t i = 0; i < specs.size(); ++i) {
        v = tape.conv2d(v, specs[i], ids.layers[i].w, ids.layers[i].b);
        if (!cfg.literal_eq4 && i + 1 < specs.size()) v = tape.relu(v);
    }
    return v;
}

template <class T>
Tensor<T> frm_forward(const Tensor<T>& x_i, const Tensor<T>& y_i, const Tensor<T>& y_next,
                      const FrmParams<T>& p, const FrmConfig& cfg) {
    Tape<T> tape;
    ValueId xi = tape.leaf(x_i), yi = tape.leaf(y_i), yn = tape.leaf(y_next);
    return tape.value(frm_forward_node(tape, xi, yi, yn, frm_register(tape, p), cfg));
}

} // namespace gsneck
