#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gsneck/tensor.hpp"

namespace gsneck {

struct ConvSpec {
    int in_ch = 0;
    int out_ch = 0;
    int kernel_h = 1;
    int kernel_w = 1;
    int stride_h = 1;
    int stride_w = 1;
    int pad_h = 0;
    int pad_w = 0;
    int groups = 1;
    bool has_bias = true;

    void validate() const {
        if (in_ch < 1 || out_ch < 1) throw ConfigError("conv channels must be >= 1");
        if (kernel_h < 1 || kernel_w < 1) throw ConfigError("conv kernel must be >= 1");
        if (stride_h < 1 || stride_w < 1) throw ConfigError("conv stride must be >= 1");
        if (pad_h < 0 || pad_w < 0) throw ConfigError("conv padding must be >= 0");
        if (groups < 1 || in_ch % groups != 0 || out_ch % groups != 0)
            throw ConfigError("in_ch and out_ch must be divisible by groups");
    }

    Shape4 weight_shape() const { return Shape4{out_ch, in_ch / groups, kernel_h, kernel_w}; }
    Shape4 bias_shape() const { return Shape4{out_ch, 1, 1, 1}; }

    std::pair<int, int> out_hw(int h, int w) const {
        const int oh = (h + 2 * pad_h - kernel_h) / stride_h + 1;
        const int ow = (w + 2 * pad_w - kernel_w) / stride_w + 1;
        if (h + 2 * pad_h < kernel_h || w + 2 * pad_w < kernel_w || oh < 1 || ow < 1)
            throw GeometryError("nonpositive conv output for input " + std::to_string(h) + "x" +
                                std::to_string(w));
        return {oh, ow};
    }

    int64_t param_count() const {
        return weight_shape().numel() + (has_bias ? out_ch : 0);
    }

    // multiply-accumulates per batch item at the given input resolution
    int64_t mac_count(int h, int w) const {
        auto [oh, ow] = out_hw(h, w);
        return int64_t(out_ch) * (in_ch / groups) * kernel_h * kernel_w * oh * ow;
    }

    // stride-1 "same" conv for an odd kernel
    static ConvSpec same(int in_ch, int out_ch, int kh, int kw, int groups = 1, bool bias = true) {
        if (kh % 2 == 0 || kw % 2 == 0)
            throw ConfigError("same-padding conv requires odd kernel, got " + std::to_string(kh) +
                              "x" + std::to_string(kw));
        ConvSpec s;
        s.in_ch = in_ch;
        s.out_ch = out_ch;
        s.kernel_h = kh;
        s.kernel_w = kw;
        s.pad_h = (kh - 1) / 2;
        s.pad_w = (kw - 1) / 2;
        s.groups = groups;
        s.has_bias = bias;
        return s;
    }
};

template <class T>
void check_conv_args(const Tensor<T>& x, const ConvSpec& spec, const Tensor<T>& w,
                     const Tensor<T>* b) {
    spec.validate();
    if (x.shape().c != spec.in_ch)
        throw ShapeError("conv input has " + std::to_string(x.shape().c) + " channels, spec wants " +
                         std::to_string(spec.in_ch));
    if (!(w.shape() == spec.weight_shape()))
        throw ShapeError("conv weight " + w.shape().str() + " vs expected " +
                         spec.weight_shape().str());
    if (spec.has_bias) {
        if (b == nullptr) throw ShapeError("conv spec has bias but none supplied");
        if (b->numel() != spec.out_ch)
            throw ShapeError("conv bias length " + std::to_string(b->numel()) + " vs out_ch " +
                             std::to_string(spec.out_ch));
    } else if (b != nullptr) {
        throw ShapeError("conv spec is bias-free but a bias was supplied");
    }
}

// im2col + per-group matrix product; the fast path checked against direct_conv_oracle.
template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const ConvSpec& spec, const Tensor<T>& w,
                 const Tensor<T>* b = nullptr) {
    check_conv_args(x, spec, w, b);
    const Shape4 xs = x.shape();
    auto [oh, ow] = spec.out_hw(static_cast<int>(xs.h), static_cast<int>(xs.w));
    const int cg = spec.in_ch / spec.groups;
    const int og = spec.out_ch / spec.groups;
    const int64_t cols_h = int64_t(cg) * spec.kernel_h * spec.kernel_w;
    const int64_t cols_w = int64_t(oh) * ow;

    Tensor<T> out(Shape4{xs.n, spec.out_ch, oh, ow});
    std::vector<T> cols(static_cast<size_t>(cols_h * cols_w));

    for (int64_t n = 0; n < xs.n; ++n) {
        for (int g = 0; g < spec.groups; ++g) {
            // gather the group's receptive fields into a (cg*kh*kw, oh*ow) matrix
            for (int c = 0; c < cg; ++c) {
                const int64_t ic = int64_t(g) * cg + c;
                for (int ky = 0; ky < spec.kernel_h; ++ky) {
                    for (int kx = 0; kx < spec.kernel_w; ++kx) {
                        const int64_t row = (int64_t(c) * spec.kernel_h + ky) * spec.kernel_w + kx;
                        T* dst = cols.data() + row * cols_w;
                        for (int y = 0; y < oh; ++y) {
                            const int iy = y * spec.stride_h - spec.pad_h + ky;
                            for (int xo = 0; xo < ow; ++xo) {
                                const int ix = xo * spec.stride_w - spec.pad_w + kx;
                                const bool in = iy >= 0 && iy < xs.h && ix >= 0 && ix < xs.w;
                                dst[int64_t(y) * ow + xo] = in ? x.at(n, ic, iy, ix) : T(0);
                            }
                        }
                    }
                }
            }
            for (int o = 0; o < og; ++o) {
                const int64_t oc = int64_t(g) * og + o;
                const T* wrow = w.data() + oc * cols_h;
                T* orow = out.data() + out.index(n, oc, 0, 0);
                const T bias = spec.has_bias ? (*b)[oc] : T(0);
                for (int64_t p = 0; p < cols_w; ++p) orow[p] = bias;
                for (int64_t r = 0; r < cols_h; ++r) {
                    const T wv = wrow[r];
                    if (wv == T(0)) continue;
                    const T* crow = cols.data() + r * cols_w;
                    for (int64_t p = 0; p < cols_w; ++p) orow[p] += wv * crow[p];
                }
            }
        }
    }
    check_finite(out, "conv2d");
    return out;
}

// Literal 7-nested-loop definition; ground truth for conv2d and, when a counter is
// passed, the instrumented MAC oracle (every kernel tap counts, padded taps included).
template <class T>
Tensor<T> direct_conv_oracle(const Tensor<T>& x, const ConvSpec& spec, const Tensor<T>& w,
                             const Tensor<T>* b = nullptr, uint64_t* mac_counter = nullptr) {
    check_conv_args(x, spec, w, b);
    const Shape4 xs = x.shape();
    auto [oh, ow] = spec.out_hw(static_cast<int>(xs.h), static_cast<int>(xs.w));
    const int cg = spec.in_ch / spec.groups;
    const int og = spec.out_ch / spec.groups;
    Tensor<T> out(Shape4{xs.n, spec.out_ch, oh, ow});

    for (int64_t n = 0; n < xs.n; ++n)
        for (int oc = 0; oc < spec.out_ch; ++oc)
            for (int y = 0; y < oh; ++y)
                for (int xo = 0; xo < ow; ++xo) {
                    T acc = spec.has_bias ? (*b)[oc] : T(0);
                    const int g = oc / og;
                    for (int c = 0; c < cg; ++c)
                        for (int ky = 0; ky < spec.kernel_h; ++ky)
                            for (int kx = 0; kx < spec.kernel_w; ++kx) {
                                if (mac_counter) ++*mac_counter;
                                const int iy = y * spec.stride_h - spec.pad_h + ky;
                                const int ix = xo * spec.stride_w - spec.pad_w + kx;
                                if (iy < 0 || iy >= xs.h || ix < 0 || ix >= xs.w) continue;
                                acc += w.at(oc, c, ky, kx) * x.at(n, int64_t(g) * cg + c, iy, ix);
                            }
                    out.at(n, oc, y, xo) = acc;
                }
    check_finite(out, "direct_conv_oracle");
    return out;
}

template <class T>
struct ConvGrads {
    Tensor<T> dx, dw;
    std::optional<Tensor<T>> db;
};

template <class T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const ConvSpec& spec, const Tensor<T>& w,
                             const Tensor<T>& dout) {
    const Shape4 xs = x.shape();
    auto [oh, ow] = spec.out_hw(static_cast<int>(xs.h), static_cast<int>(xs.w));
    if (!(dout.shape() == Shape4{xs.n, spec.out_ch, oh, ow}))
        throw ShapeError("conv2d_backward dOut " + dout.shape().str());

    ConvGrads<T> g;
    g.dx = Tensor<T>(xs);
    g.dw = Tensor<T>(spec.weight_shape());
    if (spec.has_bias) g.db = Tensor<T>(spec.bias_shape());

    const int cg = spec.in_ch / spec.groups;
    const int og = spec.out_ch / spec.groups;
    for (int64_t n = 0; n < xs.n; ++n)
        for (int oc = 0; oc < spec.out_ch; ++oc) {
            const int grp = oc / og;
            for (int y = 0; y < oh; ++y)
                for (int xo = 0; xo < ow; ++xo) {
                    const T d = dout.at(n, oc, y, xo);
                    if (spec.has_bias) (*g.db)[oc] += d;
                    if (d == T(0)) continue;
                    for (int c = 0; c < cg; ++c)
                        for (int ky = 0; ky < spec.kernel_h; ++ky)
                            for (int kx = 0; kx < spec.kernel_w; ++kx) {
                                const int iy = y * spec.stride_h - spec.pad_h + ky;
                                const int ix = xo * spec.stride_w - spec.pad_w + kx;
                                if (iy < 0 || iy >= xs.h || ix < 0 || ix >= xs.w) continue;
                                const int64_t ic = int64_t(grp) * cg + c;
                                g.dw.at(oc, c, ky, kx) += d * x.at(n, ic, iy, ix);
                                g.dx.at(n, ic, iy, ix) += d * w.at(oc, c, ky, kx);
                            }
                }
        }
    return g;
}

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
    Tensor<T> out(x.shape());
    const int64_t n = x.numel();
    for (int64_t i = 0; i < n; ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
    return out;
}

// d relu / dx at exactly 0 is 0
template <class T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& dout) {
    if (!(x.shape() == dout.shape())) throw ShapeError("relu_backward shape mismatch");
    Tensor<T> dx(x.shape());
    const int64_t n = x.numel();
    for (int64_t i = 0; i < n; ++i) dx[i] = x[i] > T(0) ? dout[i] : T(0);
    return dx;
}

template <class T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& parts) {
    if (parts.empty()) throw ShapeError("concat_channels needs at least one part");
    const Shape4 s0 = parts[0].shape();
    int64_t total_c = 0;
    for (const auto& p : parts) {
        const Shape4 s = p.shape();
        if (s.n != s0.n || s.h != s0.h || s.w != s0.w)
            throw ShapeError("concat_channels part " + s.str() + " vs " + s0.str());
        total_c += s.c;
    }
    Tensor<T> out(Shape4{s0.n, total_c, s0.h, s0.w});
    const int64_t plane = s0.h * s0.w;
    for (int64_t n = 0; n < s0.n; ++n) {
        int64_t c_off = 0;
        for (const auto& p : parts) {
            const int64_t pc = p.shape().c;
            std::memcpy(out.data() + out.index(n, c_off, 0, 0), p.data() + p.index(n, 0, 0, 0),
                        static_cast<size_t>(pc * plane) * sizeof(T));
            c_off += pc;
        }
    }
    return out;
}

template <class T>
Tensor<T> slice_channels(const Tensor<T>& x, int64_t c0, int64_t c1) {
    const Shape4 s = x.shape();
    if (c0 < 0 || c1 > s.c || c0 >= c1) throw ShapeError("slice_channels bad range");
    Tensor<T> out(Shape4{s.n, c1 - c0, s.h, s.w});
    const int64_t plane = s.h * s.w;
    for (int64_t n = 0; n < s.n; ++n)
        std::memcpy(out.data() + out.index(n, 0, 0, 0), x.data() + x.index(n, c0, 0, 0),
                    static_cast<size_t>((c1 - c0) * plane) * sizeof(T));
    return out;
}

enum class UpsampleMode { Nearest, Bilinear };

struct UpsampleSpec {
    int factor = 2;
    UpsampleMode mode = UpsampleMode::Bilinear;

    void validate() const {
        if (factor < 1) throw ConfigError("upsample factor must be >= 1");
    }
};

namespace detail {

struct LinearTap {
    int64_t i0, i1;
    double w1; // weight on i1; (1 - w1) on i0
};

// half-pixel-center source sampling, clamped to the valid range
inline LinearTap bilinear_tap(int64_t t, int factor, int64_t extent) {
    double s = (static_cast<double>(t) + 0.5) / factor - 0.5;
    if (s < 0) s = 0;
    if (s > static_cast<double>(extent - 1)) s = static_cast<double>(extent - 1);
    int64_t i0 = static_cast<int64_t>(s);
    if (i0 > extent - 2) i0 = extent >= 2 ? extent - 2 : 0;
    int64_t i1 = extent >= 2 ? i0 + 1 : 0;
    return LinearTap{i0, i1, s - static_cast<double>(i0)};
}

} // namespace detail

template <class T>
Tensor<T> upsample(const Tensor<T>& x, const UpsampleSpec& spec) {
    spec.validate();
    const Shape4 s = x.shape();
    const int f = spec.factor;
    Tensor<T> out(Shape4{s.n, s.c, s.h * f, s.w * f});
    if (spec.mode == UpsampleMode::Nearest) {
        for (int64_t n = 0; n < s.n; ++n)
            for (int64_t c = 0; c < s.c; ++c)
                for (int64_t y = 0; y < s.h * f; ++y)
                    for (int64_t xo = 0; xo < s.w * f; ++xo)
                        out.at(n, c, y, xo) = x.at(n, c, y / f, xo / f);
        return out;
    }
    std::vector<detail::LinearTap> ty, tx;
    for (int64_t y = 0; y < s.h * f; ++y) ty.push_back(detail::bilinear_tap(y, f, s.h));
    for (int64_t xo = 0; xo < s.w * f; ++xo) tx.push_back(detail::bilinear_tap(xo, f, s.w));
    for (int64_t n = 0; n < s.n; ++n)
        for (int64_t c = 0; c < s.c; ++c)
            for (int64_t y = 0; y < s.h * f; ++y)
                for (int64_t xo = 0; xo < s.w * f; ++xo) {
                    const auto& a = ty[static_cast<size_t>(y)];
                    const auto& b = tx[static_cast<size_t>(xo)];
                    const T v00 = x.at(n, c, a.i0, b.i0), v01 = x.at(n, c, a.i0, b.i1);
                    const T v10 = x.at(n, c, a.i1, b.i0), v11 = x.at(n, c, a.i1, b.i1);
                    const T wy = static_cast<T>(a.w1), wx = static_cast<T>(b.w1);
                    out.at(n, c, y, xo) = (T(1) - wy) * ((T(1) - wx) * v00 + wx * v01) +
                                          wy * ((T(1) - wx) * v10 + wx * v11);
                }
    return out;
}

// transpose of the forward linear map
template <class T>
Tensor<T> upsample_backward(const Shape4& in_shape, const UpsampleSpec& spec,
                            const Tensor<T>& dout) {
    spec.validate();
    const int f = spec.factor;
    if (!(dout.shape() == Shape4{in_shape.n, in_shape.c, in_shape.h * f, in_shape.w * f}))
        throw ShapeError("upsample_backward dOut " + dout.shape().str());
    Tensor<T> dx(in_shape);
    const Shape4 os = dout.shape();
    if (spec.mode == UpsampleMode::Nearest) {
        for (int64_t n = 0; n < os.n; ++n)
            for (int64_t c = 0; c < os.c; ++c)
                for (int64_t y = 0; y < os.h; ++y)
                    for (int64_t xo = 0; xo < os.w; ++xo)
                        dx.at(n, c, y / f, xo / f) += dout.at(n, c, y, xo);
        return dx;
    }
    std::vector<detail::LinearTap> ty, tx;
    for (int64_t y = 0; y < os.h; ++y) ty.push_back(detail::bilinear_tap(y, f, in_shape.h));
    for (int64_t xo = 0; xo < os.w; ++xo) tx.push_back(detail::bilinear_tap(xo, f, in_shape.w));
    for (int64_t n = 0; n < os.n; ++n)
        for (int64_t c = 0; c < os.c; ++c)
            for (int64_t y = 0; y < os.h; ++y)
                for (int64_t xo = 0; xo < os.w; ++xo) {
                    const auto& a = ty[static_cast<size_t>(y)];
                    const auto& b = tx[static_cast<size_t>(xo)];
                    const T d = dout.at(n, c, y, xo);
                    const T wy = static_cast<T>(a.w1), wx = static_cast<T>(b.w1);
                    dx.at(n, c, a.i0, b.i0) += (T(1) - wy) * (T(1) - wx) * d;
                    dx.at(n, c, a.i0, b.i1) += (T(1) - wy) * wx * d;
                    dx.at(n, c, a.i1, b.i0) += wy * (T(1) - wx) * d;
                    dx.at(n, c, a.i1, b.i1) += wy * wx * d;
                }
    return dx;
}

} // namespace gsneck
