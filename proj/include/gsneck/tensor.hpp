#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "gsneck/errors.hpp"

namespace gsneck {

enum class DType : uint32_t { F32 = 1, F64 = 2 };

template <class T>
constexpr DType dtype_of() {
    static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
    return std::is_same_v<T, float> ? DType::F32 : DType::F64;
}

struct Shape4 {
    int64_t n = 0, c = 0, h = 0, w = 0;

    int64_t numel() const { return n * c * h * w; }
    bool operator==(const Shape4&) const = default;

    std::string str() const {
        std::ostringstream os;
        os << "(" << n << "," << c << "," << h << "," << w << ")";
        return os.str();
    }
};

// splitmix64: the deterministic generator behind all seeded fills and inits.
// Portable across platforms, documented in the README.
inline uint64_t splitmix64_next(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Decorrelates derived seeds (per-tensor, per-level).
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (salt + 1));
    return splitmix64_next(s);
}

inline double unit_double(uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }
inline float unit_float(uint64_t bits) { return static_cast<float>(bits >> 40) * 0x1.0p-24f; }

template <class T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape4 shape) : shape_(shape) {
        check_shape(shape);
        data_.assign(static_cast<size_t>(shape.numel()), T(0));
    }

    Tensor(Shape4 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
        check_shape(shape);
        if (static_cast<int64_t>(data_.size()) != shape.numel())
            throw ShapeError("data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape.str());
    }

    static Tensor zeros(Shape4 shape) { return Tensor(shape); }

    static Tensor ones(Shape4 shape) { return constant(shape, T(1)); }

    static Tensor constant(Shape4 shape, T v) {
        Tensor t(shape);
        std::fill(t.data_.begin(), t.data_.end(), v);
        return t;
    }

    static Tensor uniform(Shape4 shape, uint64_t seed, T lo, T hi) {
        if (!(lo <= hi)) throw ConfigError("uniform fill requires lo <= hi");
        Tensor t(shape);
        uint64_t state = seed;
        for (auto& v : t.data_) {
            uint64_t bits = splitmix64_next(state);
            if constexpr (std::is_same_v<T, float>)
                v = lo + unit_float(bits) * (hi - lo);
            else
                v = lo + unit_double(bits) * (hi - lo);
        }
        return t;
    }

    const Shape4& shape() const { return shape_; }
    int64_t numel() const { return shape_.numel(); }
    DType dtype() const { return dtype_of<T>(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    T operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    int64_t index(int64_t n, int64_t c, int64_t h, int64_t w) const {
        return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
    }

    T& at(int64_t n, int64_t c, int64_t h, int64_t w) { return data_[static_cast<size_t>(index(n, c, h, w))]; }
    T at(int64_t n, int64_t c, int64_t h, int64_t w) const { return data_[static_cast<size_t>(index(n, c, h, w))]; }

    bool bit_equal(const Tensor& other) const {
        if (!(shape_ == other.shape_)) return false;
        return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(T)) == 0;
    }

private:
    static void check_shape(const Shape4& s) {
        for (int64_t d : {s.n, s.c, s.h, s.w})
            if (d < 0) throw ShapeError("negative dimension in " + s.str());
        // guard against overflow of the element count
        uint64_t prod = 1;
        for (int64_t d : {s.n, s.c, s.h, s.w}) {
            if (d == 0) return;
            if (prod > (uint64_t(1) << 48) / static_cast<uint64_t>(d))
                throw SizeError("shape " + s.str() + " exceeds addressable size");
            prod *= static_cast<uint64_t>(d);
        }
    }

    Shape4 shape_{};
    std::vector<T> data_;
};

template <class T>
void check_finite(const Tensor<T>& t, const char* context) {
    for (T v : t.vec())
        if (!std::isfinite(v))
            throw NumericError(std::string("non-finite value produced by ") + context);
}

template <class T>
Tensor<T> elementwise_add(const Tensor<T>& a, const Tensor<T>& b) {
    if (!(a.shape() == b.shape()))
        throw ShapeError("elementwise_add " + a.shape().str() + " vs " + b.shape().str());
    Tensor<T> out(a.shape());
    const int64_t n = a.numel();
    for (int64_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
    check_finite(out, "elementwise_add");
    return out;
}

template <class T>
Tensor<T> transpose_hw(const Tensor<T>& a) {
    const Shape4 s = a.shape();
    Tensor<T> out(Shape4{s.n, s.c, s.w, s.h});
    for (int64_t n = 0; n < s.n; ++n)
        for (int64_t c = 0; c < s.c; ++c)
            for (int64_t h = 0; h < s.h; ++h)
                for (int64_t w = 0; w < s.w; ++w)
                    out.at(n, c, w, h) = a.at(n, c, h, w);
    return out;
}

} // namespace gsneck
