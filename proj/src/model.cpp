#include "semsar/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "semsar/random.hpp"

namespace semsar {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw InvalidInput("sample_without_replacement: k > n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

PhaseHistory dft2_forward(const ComplexImage& img) {
    if (img.empty()) throw InvalidInput("dft2_forward: empty image");
    if (!img.all_finite()) throw InvalidInput("dft2_forward: non-finite input");
    PhaseHistory out(img.rows(), img.cols());
    detail::unitary_dft2(img.values(), out.values(), img.rows(), img.cols(), -1);
    return out;
}

ComplexImage dft2_adjoint(const PhaseHistory& ph) {
    if (ph.empty()) throw InvalidInput("dft2_adjoint: empty spectrum");
    if (!ph.all_finite()) throw InvalidInput("dft2_adjoint: non-finite input");
    ComplexImage out(ph.rows(), ph.cols());
    detail::unitary_dft2(ph.values(), out.values(), ph.rows(), ph.cols(), +1);
    return out;
}

PhaseHistory fftshift(const PhaseHistory& ph) {
    const std::size_t R = ph.rows(), C = ph.cols();
    PhaseHistory out(R, C);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) out((r + R / 2) % R, (c + C / 2) % C) = ph(r, c);
    return out;
}

PhaseHistory ifftshift(const PhaseHistory& ph) {
    const std::size_t R = ph.rows(), C = ph.cols();
    PhaseHistory out(R, C);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) out(r, c) = ph((r + R / 2) % R, (c + C / 2) % C);
    return out;
}

std::string_view to_string(MaskKind kind) {
    switch (kind) {
    case MaskKind::Mask1: return "mask1";
    case MaskKind::Mask2: return "mask2";
    case MaskKind::Mask3: return "mask3";
    }
    return "unknown";
}

MaskKind parse_mask_kind(std::string_view s) {
    if (s == "mask1" || s == "1") return MaskKind::Mask1;
    if (s == "mask2" || s == "2") return MaskKind::Mask2;
    if (s == "mask3" || s == "3") return MaskKind::Mask3;
    throw InvalidInput("unknown mask kind '" + std::string(s) + "'");
}

SamplingMask::SamplingMask(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> kept, MaskSpec spec)
    : rows_(rows), cols_(cols), kept_(std::move(kept)), spec_(spec) {
    if (rows == 0 || cols == 0) throw InvalidInput("mask dimensions must be positive");
    if (kept_.size() != rows * cols) throw InvalidInput("mask cell count does not match its shape");
    for (auto& k : kept_) k = k ? 1 : 0;
    count_ = static_cast<std::size_t>(std::count(kept_.begin(), kept_.end(), std::uint8_t{1}));
}

namespace {

void check_rate(double rate, const char* name) {
    if (!(rate > 0.0 && rate <= 1.0)) {
        throw InvalidInput(std::string("sampling rate ") + name + " must lie in (0, 1], got " + std::to_string(rate));
    }
}

std::size_t rounded_count(double rate, std::size_t n) {
    const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
}

} // namespace

MaskPtr make_mask(const MaskSpec& spec_in, std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (rows == 0 || cols == 0) throw InvalidInput("make_mask: dimensions must be positive");
    MaskSpec spec = spec_in;
    Rng rng(seed);
    std::vector<std::uint8_t> kept(rows * cols, 0);
    switch (spec.kind) {
    case MaskKind::Mask1: {
        check_rate(spec.eta, "eta");
        spec.eta_c = 1.0;
        spec.eta_r = 1.0;
        for (auto i : sample_without_replacement(rows * cols, rounded_count(spec.eta, rows * cols), rng)) kept[i] = 1;
        break;
    }
    case MaskKind::Mask2: {
        check_rate(spec.eta_c, "eta_c");
        spec.eta_r = 1.0;
        spec.eta = spec.eta_c;
        for (auto c : sample_without_replacement(cols, rounded_count(spec.eta_c, cols), rng))
            for (std::size_t r = 0; r < rows; ++r) kept[r * cols + c] = 1;
        break;
    }
    case MaskKind::Mask3: {
        check_rate(spec.eta_c, "eta_c");
        check_rate(spec.eta_r, "eta_r");
        spec.eta = spec.eta_c * spec.eta_r;
        const std::size_t per_col = rounded_count(spec.eta_r, rows);
        for (auto c : sample_without_replacement(cols, rounded_count(spec.eta_c, cols), rng))
            for (auto r : sample_without_replacement(rows, per_col, rng)) kept[r * cols + c] = 1;
        break;
    }
    default: throw InvalidInput("make_mask: unknown mask kind");
    }
    return std::make_shared<const SamplingMask>(rows, cols, std::move(kept), spec);
}

MaskPtr full_mask(std::size_t rows, std::size_t cols) {
    return std::make_shared<const SamplingMask>(rows, cols, std::vector<std::uint8_t>(rows * cols, 1),
                                                MaskSpec{MaskKind::Mask1, 1.0, 1.0, 1.0});
}

MeasurementVector::MeasurementVector(std::vector<cplx> values, MaskPtr mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
    if (!mask_) throw InvalidInput("measurement vector requires a mask");
    if (values_.size() != mask_->count()) {
        throw InvalidInput("measurement length " + std::to_string(values_.size()) +
                           " does not match mask popcount " + std::to_string(mask_->count()));
    }
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidInput("measurement contains non-finite values");
}

NoiseSpec NoiseSpec::relative_to(const MeasurementVector& clean, double relative) {
    if (!(relative >= 0.0)) throw InvalidInput("relative noise level must be non-negative");
    double s = 0.0;
    for (const auto& v : clean.values()) s += std::norm(v);
    const double rms = clean.size() ? std::sqrt(s / static_cast<double>(clean.size())) : 0.0;
    return NoiseSpec{relative * rms};
}

MeasurementVector select(const PhaseHistory& ph, const MaskPtr& mask) {
    if (!mask) throw InvalidInput("select: null mask");
    if (ph.rows() != mask->rows() || ph.cols() != mask->cols()) {
        throw InvalidInput("measurement_forward: image and mask shapes differ");
    }
    std::vector<cplx> out;
    out.reserve(mask->count());
    for (std::size_t i = 0; i < ph.size(); ++i)
        if (mask->kept(i)) out.push_back(ph[i]);
    return MeasurementVector(std::move(out), mask);
}

PhaseHistory scatter(const MeasurementVector& m) {
    const auto& mask = m.mask();
    PhaseHistory out(mask.rows(), mask.cols());
    std::size_t j = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (mask.kept(i)) out[i] = m.values()[j++];
    return out;
}

MeasurementVector measurement_forward(const ComplexImage& img, const MaskPtr& mask) {
    if (!mask) throw InvalidInput("measurement_forward: null mask");
    if (img.rows() != mask->rows() || img.cols() != mask->cols()) {
        throw InvalidInput("measurement_forward: image and mask shapes differ");
    }
    return select(dft2_forward(img), mask);
}

ComplexImage measurement_adjoint(const MeasurementVector& m) { return dft2_adjoint(scatter(m)); }

ComplexImage measurement_normal(const ComplexImage& img, const SamplingMask& mask) {
    if (img.rows() != mask.rows() || img.cols() != mask.cols()) {
        throw InvalidInput("measurement_normal: image and mask shapes differ");
    }
    PhaseHistory spec = dft2_forward(img);
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (!mask.kept(i)) spec[i] = {0.0, 0.0};
    return dft2_adjoint(spec);
}

std::vector<double> taylor_window(std::size_t n, double sidelobe_db, int nbar) {
    if (n == 0) throw InvalidInput("taylor_window: length must be positive");
    if (nbar < 1) throw InvalidInput("taylor_window: nbar must be >= 1");
    if (!(sidelobe_db > 0.0)) throw InvalidInput("taylor_window: sidelobe level must be positive");

    const double pi = std::numbers::pi;
    const double ratio = std::pow(10.0, sidelobe_db / 20.0);
    const double A = std::acosh(ratio) / pi;
    const double nb = static_cast<double>(nbar);
    const double sigma2 = nb * nb / (A * A + (nb - 0.5) * (nb - 0.5));

    std::vector<double> coeff(static_cast<std::size_t>(nbar > 1 ? nbar - 1 : 0));
    for (int m = 1; m < nbar; ++m) {
        const double m2 = static_cast<double>(m) * m;
        double num = 1.0;
        double den = 1.0;
        for (int j = 1; j < nbar; ++j) {
            num *= 1.0 - m2 / (sigma2 * (A * A + (j - 0.5) * (j - 0.5)));
            if (j != m) den *= 1.0 - m2 / (static_cast<double>(j) * j);
        }
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        coeff[static_cast<std::size_t>(m - 1)] = sign * num / (2.0 * den);
    }

    const double N = static_cast<double>(n);
    auto eval = [&](double x) {
        double s = 1.0;
        for (int m = 1; m < nbar; ++m)
            s += 2.0 * coeff[static_cast<std::size_t>(m - 1)] * std::cos(2.0 * pi * m * (x - N / 2.0 + 0.5) / N);
        return s;
    };
    const double centre = eval((N - 1.0) / 2.0);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = eval(static_cast<double>(i)) / centre;
    return w;
}

RealGrid taylor_window_2d(std::size_t rows, std::size_t cols, double sidelobe_db, int nbar) {
    const auto wr = taylor_window(rows, sidelobe_db, nbar);
    const auto wc = taylor_window(cols, sidelobe_db, nbar);
    RealGrid out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = wr[r] * wc[c];
    return out;
}

PhaseHistory apply_window(const PhaseHistory& ph, const RealGrid& window) {
    if (!ph.same_shape(window)) throw InvalidInput("apply_window: shape mismatch");
    PhaseHistory out = ph;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= window[i];
    return out;
}

PhaseHistory remove_window(const PhaseHistory& ph, const RealGrid& window) {
    if (!ph.same_shape(window)) throw InvalidInput("remove_window: shape mismatch");
    PhaseHistory out = ph;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(window[i] > 0.0)) throw InvalidInput("remove_window: window must be positive");
        out[i] /= window[i];
    }
    return out;
}

namespace {

void check_layout(const MstarLayout& l) {
    if (l.output_size == 0 || l.row_offset + l.output_size > l.input_size ||
        l.col_offset + l.output_size > l.input_size) {
        throw InvalidInput("MSTAR layout: retained block does not fit inside the input");
    }
}

} // namespace

PhaseHistory mstar_preprocess(const ComplexImage& img, const MstarLayout& layout) {
    check_layout(layout);
    if (img.rows() != layout.input_size || img.cols() != layout.input_size) {
        throw InvalidInput("mstar_preprocess: expected a " + std::to_string(layout.input_size) + "x" +
                           std::to_string(layout.input_size) + " image, got " + std::to_string(img.rows()) + "x" +
                           std::to_string(img.cols()));
    }
    const PhaseHistory centred = fftshift(dft2_forward(img));
    const std::size_t n = layout.output_size;
    PhaseHistory crop(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) crop(r, c) = centred(r + layout.row_offset, c + layout.col_offset);
    const RealGrid w = taylor_window_2d(n, n, layout.sidelobe_db, layout.nbar);
    return ifftshift(remove_window(crop, w));
}

ComplexImage mstar_embed(const PhaseHistory& raw, const MstarLayout& layout) {
    check_layout(layout);
    const std::size_t n = layout.output_size;
    if (raw.rows() != n || raw.cols() != n) throw InvalidInput("mstar_embed: raw phase history has the wrong shape");
    const RealGrid w = taylor_window_2d(n, n, layout.sidelobe_db, layout.nbar);
    const PhaseHistory tapered = apply_window(fftshift(raw), w);
    PhaseHistory padded(layout.input_size, layout.input_size);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) padded(r + layout.row_offset, c + layout.col_offset) = tapered(r, c);
    return dft2_adjoint(ifftshift(padded));
}

} // namespace semsar
