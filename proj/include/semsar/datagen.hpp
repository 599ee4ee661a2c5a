#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "semsar/features.hpp"
#include "semsar/label_map.hpp"
#include "semsar/model.hpp"

namespace semsar {

/// Half-open pixel rectangle [r0, r1) x [c0, c1).
struct Rect {
    std::size_t r0 = 0, r1 = 0, c0 = 0, c1 = 0;

    std::size_t area() const noexcept { return (r1 - r0) * (c1 - c0); }
    bool contains(std::size_t r, std::size_t c) const noexcept { return r >= r0 && r < r1 && c >= c0 && c < c1; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// One target with its shadow directly up-range (smaller row indices).
struct SceneSpec {
    std::size_t rows = 64;
    std::size_t cols = 64;
    Rect target{26, 38, 28, 36};
    Rect shadow{14, 26, 28, 36};
    GammaFeature shadow_gamma{0.9, 0.02};
    GammaFeature background_gamma{0.8, 0.15};
    GammaFeature target_gamma{0.6, 1.5};
    std::uint64_t seed = 0;

    void validate() const;
    const GammaFeature& gamma(Label l) const;
};

struct Scene {
    ComplexImage image;
    LabelMap truth;
};

/// Gamma magnitudes per class, independent uniform phases.
Scene synth_scene(const SceneSpec& spec);

/// Phi A scene + complex Gaussian noise (E|e|^2 = sigma^2) on the kept cells.
MeasurementVector simulate_acquisition(const ComplexImage& scene, const MaskPtr& mask, const NoiseSpec& noise,
                                       std::uint64_t seed);

} // namespace semsar
