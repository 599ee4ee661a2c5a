#include "semsar/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "semsar/error.hpp"
#include "semsar/random.hpp"

namespace semsar {

namespace {

void check_rect(const Rect& r, std::size_t rows, std::size_t cols, const char* what) {
    if (!(r.r0 < r.r1 && r.c0 < r.c1 && r.r1 <= rows && r.c1 <= cols)) {
        throw InvalidInput(std::string("scene: ") + what + " rectangle is empty or outside the grid");
    }
}

void check_gamma(const GammaFeature& f, const char* what) {
    if (!(f.shape > 0.0) || !(f.scale > 0.0) || !std::isfinite(f.shape) || !std::isfinite(f.scale)) {
        throw InvalidInput(std::string("scene: invalid Gamma parameters for ") + what);
    }
}

} // namespace

void SceneSpec::validate() const {
    if (rows == 0 || cols == 0) throw InvalidInput("scene: grid must be non-empty");
    check_rect(target, rows, cols, "target");
    check_rect(shadow, rows, cols, "shadow");
    if (shadow.r1 > target.r0) throw InvalidInput("scene: shadow must lie up-range of (above) the target");
    check_gamma(shadow_gamma, "shadow");
    check_gamma(background_gamma, "background");
    check_gamma(target_gamma, "target");
    const double ms = shadow_gamma.shape * shadow_gamma.scale;
    const double mb = background_gamma.shape * background_gamma.scale;
    const double mt = target_gamma.shape * target_gamma.scale;
    if (!(ms < mb && mb < mt)) throw InvalidInput("scene: class means must satisfy shadow < background < target");
}

const GammaFeature& SceneSpec::gamma(Label l) const {
    switch (l) {
    case Label::Shadow: return shadow_gamma;
    case Label::Background: return background_gamma;
    case Label::Target: return target_gamma;
    }
    return background_gamma;
}

Scene synth_scene(const SceneSpec& spec) {
    spec.validate();
    LabelMap truth(spec.rows, spec.cols, Label::Background);
    for (std::size_t r = 0; r < spec.rows; ++r)
        for (std::size_t c = 0; c < spec.cols; ++c) {
            if (spec.target.contains(r, c)) truth.set(r, c, Label::Target);
            else if (spec.shadow.contains(r, c)) truth.set(r, c, Label::Shadow);
        }

    Rng rng(derive_seed(spec.seed, "scene"));
    std::array<std::gamma_distribution<double>, 3> draw;
    for (Label l : kAllLabels) draw[index(l)] = std::gamma_distribution<double>(spec.gamma(l).shape, spec.gamma(l).scale);

    ComplexImage img(spec.rows, spec.cols);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double mag = draw[index(truth[i])](rng);
        const double phase = 2.0 * std::numbers::pi * uniform01(rng);
        img[i] = std::polar(mag, phase);
    }
    return {std::move(img), std::move(truth)};
}

MeasurementVector simulate_acquisition(const ComplexImage& scene, const MaskPtr& mask, const NoiseSpec& noise,
                                       std::uint64_t seed) {
    if (!mask) throw InvalidInput("simulate_acquisition: missing mask");
    if (mask->rows() != scene.rows() || mask->cols() != scene.cols()) {
        throw InvalidInput("simulate_acquisition: mask and scene shapes differ");
    }
    if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
        throw InvalidInput("simulate_acquisition: sigma must be finite and non-negative");
    }
    MeasurementVector clean = measurement_forward(scene, mask);
    if (noise.sigma == 0.0) return clean;
    Rng rng(derive_seed(seed, "noise"));
    std::normal_distribution<double> n(0.0, noise.sigma / std::numbers::sqrt2);
    std::vector<cplx> v(clean.values().begin(), clean.values().end());
    for (auto& x : v) {
        const double re = n(rng);
        const double im = n(rng);
        x += cplx(re, im);
    }
    return MeasurementVector(std::move(v), mask);
}

} // namespace semsar
