#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "semsar/error.hpp"

namespace semsar {

using cplx = std::complex<double>;

/// Dense row-major 2-D array. The tag keeps image-domain and
/// spectrum-domain data from being mixed up at compile time.
template <class T, class Tag>
class Grid {
public:
    using value_type = T;

    Grid() = default;

    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0) {
            throw InvalidInput("grid dimensions must be positive");
        }
    }

    Grid(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows == 0 || cols == 0) {
            throw InvalidInput("grid dimensions must be positive");
        }
        if (data_.size() != rows * cols) {
            throw InvalidInput("grid data length " + std::to_string(data_.size()) +
                               " does not match " + std::to_string(rows) + "x" +
                               std::to_string(cols));
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    const std::vector<T>& vector() const noexcept { return data_; }

    template <class U, class OtherTag>
    bool same_shape(const Grid<U, OtherTag>& o) const noexcept {
        return rows_ == o.rows() && cols_ == o.cols();
    }

    bool all_finite() const noexcept {
        for (const auto& v : data_) {
            if constexpr (std::is_same_v<T, cplx>) {
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
            } else {
                if (!std::isfinite(static_cast<double>(v))) return false;
            }
        }
        return true;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

struct ImageDomain {};
struct SpectrumDomain {};
struct WeightDomain {};

using ComplexImage = Grid<cplx, ImageDomain>;
using PhaseHistory = Grid<cplx, SpectrumDomain>;
using RealGrid = Grid<double, WeightDomain>;

/// Rebrands a grid into another domain without touching values.
template <class ToTag, class T, class FromTag>
Grid<T, ToTag> retag(Grid<T, FromTag> g) {
    if (g.empty()) return {};
    return Grid<T, ToTag>(g.rows(), g.cols(), std::vector<T>(g.values().begin(), g.values().end()));
}

template <class Tag>
double frobenius_norm(const Grid<cplx, Tag>& g) {
    double s = 0.0;
    for (const auto& v : g.values()) s += std::norm(v);
    return std::sqrt(s);
}

/// ||a - b||_F
template <class Tag>
double frobenius_distance(const Grid<cplx, Tag>& a, const Grid<cplx, Tag>& b) {
    if (!a.same_shape(b)) throw InvalidInput("frobenius_distance: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

template <class Tag>
double max_magnitude(const Grid<cplx, Tag>& g) {
    double m = 0.0;
    for (const auto& v : g.values()) m = std::max(m, std::abs(v));
    return m;
}

/// Conjugate-linear in the first argument: sum conj(a) * b.
template <class Tag>
cplx inner_product(const Grid<cplx, Tag>& a, const Grid<cplx, Tag>& b) {
    if (!a.same_shape(b)) throw InvalidInput("inner_product: shape mismatch");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

template <class Tag>
RealGrid magnitudes(const Grid<cplx, Tag>& g) {
    RealGrid out(g.rows(), g.cols());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::abs(g[i]);
    return out;
}

} // namespace semsar
