#include "semsar/kernels.hpp"

#include <cmath>

namespace semsar::kernels {

namespace {

// Below this many cells the fork/join overhead dominates.
constexpr std::ptrdiff_t kParallelThreshold = 4096;

inline cplx shrink(cplx x, double t) {
    const double mag = std::abs(x);
    if (mag <= t) return {0.0, 0.0};
    return x * ((mag - t) / mag);
}

inline double semantic_weight(cplx g, std::uint8_t label, const ClassTable& table, double eps) {
    const auto& c = table[label];
    return c.inv_scale + c.shape_term / (std::abs(g) + eps);
}

inline cplx tv_cell(std::span<const cplx> g, std::size_t rows, std::size_t cols, std::size_t r, std::size_t c,
                    double eps2) {
    // Flux at (r, c) is D(g)(r, c) / sqrt(|D_h|^2 + |D_v|^2 + eps^2); the
    // gradient is -div(flux) = flux(r, c) pulled back through D^T.
    auto flux = [&](std::size_t rr, std::size_t cc, cplx& fh, cplx& fv) {
        const cplx v = g[rr * cols + cc];
        const cplx dh = (cc + 1 < cols) ? g[rr * cols + cc + 1] - v : cplx{};
        const cplx dv = (rr + 1 < rows) ? g[(rr + 1) * cols + cc] - v : cplx{};
        const double den = std::sqrt(std::norm(dh) + std::norm(dv) + eps2);
        fh = dh / den;
        fv = dv / den;
    };
    cplx fh, fv;
    flux(r, c, fh, fv);
    cplx out = -(fh + fv);
    if (c > 0) {
        cplx lh, lv;
        flux(r, c - 1, lh, lv);
        out += lh;
    }
    if (r > 0) {
        cplx uh, uv;
        flux(r - 1, c, uh, uv);
        out += uv;
    }
    return out;
}

} // namespace

namespace serial {

void soft_threshold(std::span<const cplx> x, double lambda, std::span<const double> w, std::span<cplx> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = shrink(x[i], lambda * w[i]);
}

void gradient_step(std::span<const cplx> x, std::span<const cplx> normal, std::span<const cplx> back,
                   double step, std::span<cplx> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - step * (normal[i] - back[i]);
}

void extrapolate(std::span<const cplx> cur, std::span<const cplx> prev, double coef, std::span<cplx> out) {
    for (std::size_t i = 0; i < cur.size(); ++i) out[i] = cur[i] + coef * (cur[i] - prev[i]);
}

void semantic_weights(std::span<const cplx> g, std::span<const std::uint8_t> labels, const ClassTable& table,
                      double eps, std::span<double> out) {
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = semantic_weight(g[i], labels[i], table, eps);
}

void magnitude_weights(std::span<const cplx> g, double eps, std::span<double> out) {
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = 1.0 / (std::abs(g[i]) + eps);
}

void tv_gradient(std::span<const cplx> g, std::size_t rows, std::size_t cols, double eps, std::span<cplx> out) {
    const double eps2 = eps * eps;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = tv_cell(g, rows, cols, r, c, eps2);
}

} // namespace serial

namespace omp {

void soft_threshold(std::span<const cplx> x, double lambda, std::span<const double> w, std::span<cplx> out) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = shrink(x[i], lambda * w[i]);
}

void gradient_step(std::span<const cplx> x, std::span<const cplx> normal, std::span<const cplx> back,
                   double step, std::span<cplx> out) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = x[i] - step * (normal[i] - back[i]);
}

void extrapolate(std::span<const cplx> cur, std::span<const cplx> prev, double coef, std::span<cplx> out) {
    const auto n = static_cast<std::ptrdiff_t>(cur.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = cur[i] + coef * (cur[i] - prev[i]);
}

void semantic_weights(std::span<const cplx> g, std::span<const std::uint8_t> labels, const ClassTable& table,
                      double eps, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = semantic_weight(g[i], labels[i], table, eps);
}

void magnitude_weights(std::span<const cplx> g, double eps, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = 1.0 / (std::abs(g[i]) + eps);
}

void tv_gradient(std::span<const cplx> g, std::size_t rows, std::size_t cols, double eps, std::span<cplx> out) {
    const double eps2 = eps * eps;
    const auto nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (static_cast<std::ptrdiff_t>(g.size()) >= kParallelThreshold)
    for (std::ptrdiff_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            out[static_cast<std::size_t>(r) * cols + c] = tv_cell(g, rows, cols, static_cast<std::size_t>(r), c, eps2);
}

} // namespace omp

} // namespace semsar::kernels
