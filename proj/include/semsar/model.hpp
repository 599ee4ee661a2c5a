#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "semsar/grid.hpp"

namespace semsar {

// ---------------------------------------------------------------------------
// Fourier-slice observation model
//
// The image G (rows = range, cols = cross-range) and its phase history live on
// the same grid. The forward operator is the unitary 2-D DFT (1/sqrt(rows*cols)
// in both directions), so ||A|| = 1 and A* = A^{-1}. Spectra are stored in the
// standard DFT index order (zero frequency at (0,0)).
// ---------------------------------------------------------------------------

PhaseHistory dft2_forward(const ComplexImage& img);
ComplexImage dft2_adjoint(const PhaseHistory& ph);

/// Swap quadrants so that zero frequency moves to (rows/2, cols/2).
PhaseHistory fftshift(const PhaseHistory& ph);
/// Inverse of fftshift (differs from it for odd sizes).
PhaseHistory ifftshift(const PhaseHistory& ph);

enum class MaskKind : std::uint8_t { Mask1 = 1, Mask2 = 2, Mask3 = 3 };

std::string_view to_string(MaskKind kind);
MaskKind parse_mask_kind(std::string_view s);

/// Requested undersampling rates. Mask1 reads eta; Mask2 reads eta_c (and
/// then eta = eta_c); Mask3 reads eta_c and eta_r (eta = eta_c * eta_r).
struct MaskSpec {
    MaskKind kind = MaskKind::Mask1;
    double eta = 1.0;
    double eta_c = 1.0;
    double eta_r = 1.0;
};

/// Binary keep/drop pattern over the spectrum grid.
class SamplingMask {
public:
    SamplingMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> kept, MaskSpec spec);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return kept_.size(); }
    bool kept(std::size_t r, std::size_t c) const { return kept_[r * cols_ + c] != 0; }
    bool kept(std::size_t i) const { return kept_[i] != 0; }
    std::span<const std::uint8_t> cells() const noexcept { return kept_; }
    std::size_t count() const noexcept { return count_; }
    const MaskSpec& spec() const noexcept { return spec_; }
    /// count / (rows * cols)
    double rate() const noexcept { return static_cast<double>(count_) / static_cast<double>(size()); }

    friend bool operator==(const SamplingMask& a, const SamplingMask& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.kept_ == b.kept_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint8_t> kept_;
    MaskSpec spec_;
    std::size_t count_;
};

using MaskPtr = std::shared_ptr<const SamplingMask>;

/// Deterministic for a fixed (spec, shape, seed). Mask1 keeps exactly
/// round(eta * rows * cols) cells; Mask2 keeps round(eta_c * cols) whole
/// columns; Mask3 keeps round(eta_c * cols) columns with round(eta_r * rows)
/// random rows in each of them.
MaskPtr make_mask(const MaskSpec& spec, std::size_t rows, std::size_t cols, std::uint64_t seed);

MaskPtr full_mask(std::size_t rows, std::size_t cols);

/// The observed subset r~ = Phi r, row-major over kept cells.
class MeasurementVector {
public:
    MeasurementVector(std::vector<cplx> values, MaskPtr mask);

    std::span<const cplx> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const SamplingMask& mask() const noexcept { return *mask_; }
    const MaskPtr& mask_ptr() const noexcept { return mask_; }
    std::size_t rows() const noexcept { return mask_->rows(); }
    std::size_t cols() const noexcept { return mask_->cols(); }

private:
    std::vector<cplx> values_;
    MaskPtr mask_;
};

/// Complex circular Gaussian noise: E|e|^2 = sigma^2 per kept cell.
struct NoiseSpec {
    double sigma = 0.0;

    /// sigma = relative * RMS of the noiseless measurement values.
    static NoiseSpec relative_to(const MeasurementVector& clean, double relative);
};

/// Phi: keep masked cells in row-major order.
MeasurementVector select(const PhaseHistory& ph, const MaskPtr& mask);
/// Phi*: zero-filled spectrum.
PhaseHistory scatter(const MeasurementVector& m);

/// Phi A
MeasurementVector measurement_forward(const ComplexImage& img, const MaskPtr& mask);
/// A* Phi*
ComplexImage measurement_adjoint(const MeasurementVector& m);
/// A* Phi* Phi A, the normal operator (an orthogonal projector).
ComplexImage measurement_normal(const ComplexImage& img, const SamplingMask& mask);

// ---------------------------------------------------------------------------
// Taylor tapering and MSTAR-style preprocessing
// ---------------------------------------------------------------------------

/// Classical Taylor window of length n, normalised to 1 at the centre.
std::vector<double> taylor_window(std::size_t n, double sidelobe_db = 35.0, int nbar = 4);

/// Outer product of a row window and a column window, centred layout.
RealGrid taylor_window_2d(std::size_t rows, std::size_t cols, double sidelobe_db = 35.0, int nbar = 4);

PhaseHistory apply_window(const PhaseHistory& ph, const RealGrid& window);
PhaseHistory remove_window(const PhaseHistory& ph, const RealGrid& window);

struct MstarLayout {
    std::size_t input_size = 128;
    std::size_t output_size = 100;
    /// Offset of the retained block inside the centred input spectrum.
    /// Defaults to (input_size - output_size) / 2 on both axes.
    std::size_t row_offset = 14;
    std::size_t col_offset = 14;
    double sidelobe_db = 35.0;
    int nbar = 4;
};

/// 128x128 complex image -> 100x100 raw phase history (DFT order):
/// forward DFT, centre, crop the zero band, divide out the 2-D Taylor taper.
PhaseHistory mstar_preprocess(const ComplexImage& img, const MstarLayout& layout = {});

/// Inverse construction used to build MSTAR-shaped inputs: taper, zero-pad
/// into the centred input spectrum, inverse DFT.
ComplexImage mstar_embed(const PhaseHistory& raw, const MstarLayout& layout = {});

} // namespace semsar
