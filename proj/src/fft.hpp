#pragma once

#include <span>

#include "semsar/grid.hpp"

namespace semsar::detail {

/// Unitary 2-D DFT of a row-major rows x cols array. sign = -1 forward,
/// +1 inverse. Safe to call concurrently from several threads.
void unitary_dft2(std::span<const cplx> in, std::span<cplx> out, std::size_t rows, std::size_t cols, int sign);

} // namespace semsar::detail
