#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "semsar/grid.hpp"

// Per-pixel inner loops of the solvers. Every kernel exists twice: a plain
// serial loop kept as the reference, and an OpenMP version that the library
// calls. Both produce bit-identical output for any thread count because each
// output cell depends only on its own inputs (or a fixed stencil).

namespace semsar::kernels {

/// Per-class coefficients of w = inv_scale + shape_term / (|g| + eps).
struct ClassCoefficients {
    double inv_scale = 0.0;  // 1 / b_c
    double shape_term = 0.0; // 1 - a_c
};
using ClassTable = std::array<ClassCoefficients, 3>;

namespace serial {

/// out_i = max(|x_i| - lambda w_i, 0) / |x_i| * x_i
void soft_threshold(std::span<const cplx> x, double lambda, std::span<const double> w, std::span<cplx> out);

/// out_i = x_i - step * (normal_i - back_i)
void gradient_step(std::span<const cplx> x, std::span<const cplx> normal, std::span<const cplx> back,
                   double step, std::span<cplx> out);

/// out_i = cur_i + coef * (cur_i - prev_i)
void extrapolate(std::span<const cplx> cur, std::span<const cplx> prev, double coef, std::span<cplx> out);

void semantic_weights(std::span<const cplx> g, std::span<const std::uint8_t> labels, const ClassTable& table,
                      double eps, std::span<double> out);

void magnitude_weights(std::span<const cplx> g, double eps, std::span<double> out);

/// Gradient of sum sqrt(|D_h g|^2 + |D_v g|^2 + eps^2) with forward
/// differences and a replicated (Neumann) boundary.
void tv_gradient(std::span<const cplx> g, std::size_t rows, std::size_t cols, double eps, std::span<cplx> out);

} // namespace serial

namespace omp {

void soft_threshold(std::span<const cplx> x, double lambda, std::span<const double> w, std::span<cplx> out);
void gradient_step(std::span<const cplx> x, std::span<const cplx> normal, std::span<const cplx> back,
                   double step, std::span<cplx> out);
void extrapolate(std::span<const cplx> cur, std::span<const cplx> prev, double coef, std::span<cplx> out);
void semantic_weights(std::span<const cplx> g, std::span<const std::uint8_t> labels, const ClassTable& table,
                      double eps, std::span<double> out);
void magnitude_weights(std::span<const cplx> g, double eps, std::span<double> out);
void tv_gradient(std::span<const cplx> g, std::size_t rows, std::size_t cols, double eps, std::span<cplx> out);

} // namespace omp

} // namespace semsar::kernels
