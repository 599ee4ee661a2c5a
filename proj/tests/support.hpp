#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library's numerical code.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <functional>
#include <numbers>
#include <vector>

#include <unistd.h>

#include "semsar/grid.hpp"
#include "semsar/label_map.hpp"
#include "semsar/random.hpp"

namespace semsar::test {

inline ComplexImage random_image(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    std::normal_distribution<double> n(0.0, scale);
    ComplexImage g(rows, cols);
    for (auto& v : g.values()) v = {n(rng), n(rng)};
    return g;
}

/// Direct O(N^2) unitary 2-D DFT.
inline std::vector<cplx> naive_dft2(const std::vector<cplx>& x, std::size_t rows, std::size_t cols, int sign) {
    std::vector<cplx> out(rows * cols);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows * cols));
    for (std::size_t u = 0; u < rows; ++u)
        for (std::size_t v = 0; v < cols; ++v) {
            cplx s{};
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) {
                    const double ph = sign * 2.0 * std::numbers::pi *
                                      (static_cast<double>(u * r) / static_cast<double>(rows) +
                                       static_cast<double>(v * c) / static_cast<double>(cols));
                    s += x[r * cols + c] * std::polar(1.0, ph);
                }
            out[u * cols + v] = s * scale;
        }
    return out;
}

/// Maximiser of a unimodal function on [lo, hi] by golden-section search.
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

/// Gamma shape MLE by maximising the profile log-likelihood (scale = mean/a)
/// over log(a).
inline double gamma_shape_mle_numeric(const std::vector<double>& x) {
    double sum = 0.0, sum_log = 0.0;
    for (double v : x) {
        sum += v;
        sum_log += std::log(v);
    }
    const double n = static_cast<double>(x.size());
    const double mean = sum / n, mean_log = sum_log / n;
    auto ll = [&](double t) {
        const double a = std::exp(t);
        return (a - 1.0) * mean_log - a * std::log(mean / a) - std::lgamma(a) - a;
    };
    return std::exp(golden_max(ll, std::log(1e-3), std::log(1e3)));
}

inline std::vector<double> gamma_samples(double shape, double scale, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::gamma_distribution<double> d(shape, scale);
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return x;
}

/// Directional potential table written out independently of the library:
/// rows index y_s, columns y_t, order (shadow, background, target).
inline int potential_oracle(Label s, Label t, int orientation /*0 horiz, 1 s above t, 2 s below t*/) {
    static constexpr int h[3][3] = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    static constexpr int above[3][3] = {{0, 2, 1}, {1, 0, 2}, {2, 1, 0}};
    static constexpr int below[3][3] = {{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
    const auto i = index(s), j = index(t);
    if (orientation == 0) return h[i][j];
    if (orientation == 1) return above[i][j];
    return below[i][j];
}

inline double unary_oracle(double m, double a, double b, double eps) {
    return -a * std::log((m + eps) / b) + m / b + std::lgamma(a);
}

/// Fresh empty directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("semsar_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace semsar::test
