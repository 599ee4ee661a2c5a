#include <doctest.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "semsar/datagen.hpp"

using namespace semsar;

namespace {

// Asymptotic Kolmogorov distribution tail with the Stephens correction.
double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return std::clamp(p, 0.0, 1.0);
}

double ks_gamma(std::vector<double> x, double shape, double scale) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = boost::math::gamma_p(shape, x[i] / scale);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return ks_p_value(d, x.size());
}

SceneSpec large_spec(std::uint64_t seed) {
    SceneSpec s;
    s.rows = s.cols = 128;
    s.target = {60, 110, 30, 80};
    s.shadow = {10, 60, 30, 80};
    s.seed = seed;
    return s;
}

std::vector<double> class_magnitudes(const Scene& s, Label l) {
    std::vector<double> x;
    for (std::size_t i = 0; i < s.image.size(); ++i)
        if (s.truth[i] == l) x.push_back(std::abs(s.image[i]));
    return x;
}

} // namespace

TEST_CASE("label map matches the rectangles") {
    const SceneSpec spec;
    const Scene s = synth_scene(spec);
    CHECK(s.truth.count(Label::Target) == spec.target.area());
    CHECK(s.truth.count(Label::Shadow) == spec.shadow.area());
    for (std::size_t r = 0; r < spec.rows; ++r)
        for (std::size_t c = 0; c < spec.cols; ++c) {
            const Label expect = spec.target.contains(r, c)   ? Label::Target
                                 : spec.shadow.contains(r, c) ? Label::Shadow
                                                              : Label::Background;
            CHECK(s.truth(r, c) == expect);
        }
}

TEST_CASE("class sample means lie within three standard errors") {
    const SceneSpec spec = large_spec(4);
    const Scene s = synth_scene(spec);
    for (Label l : kAllLabels) {
        const auto x = class_magnitudes(s, l);
        const GammaFeature f = spec.gamma(l);
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        const double se = std::sqrt(f.shape) * f.scale / std::sqrt(static_cast<double>(x.size()));
        CHECK(std::abs(mean - f.mean()) <= 3.0 * se);
    }
}

TEST_CASE("class histograms pass a KS test against the generating Gamma") {
    // Each test rejects a correct generator 1% of the time, so check the
    // rejection rate over many scenes instead of a single draw.
    int rejected = 0, tests = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const SceneSpec spec = large_spec(seed);
        const Scene s = synth_scene(spec);
        for (Label l : kAllLabels) {
            const auto x = class_magnitudes(s, l);
            REQUIRE(x.size() >= 2000);
            const GammaFeature f = spec.gamma(l);
            rejected += ks_gamma(x, f.shape, f.scale) < 0.01;
            ++tests;
        }
    }
    MESSAGE(rejected << "/" << tests << " KS rejections at 0.01");
    // Binomial(180, 0.01): P(X >= 7) < 0.005.
    CHECK(rejected <= 6);
}

TEST_CASE("phases are spread over the circle") {
    const Scene s = synth_scene(large_spec(5));
    cplx mean{};
    for (const auto& v : s.image.values()) mean += v / std::abs(v);
    CHECK(std::abs(mean) / static_cast<double>(s.image.size()) < 0.03);
}

TEST_CASE("scenes are deterministic in the seed") {
    SceneSpec spec;
    spec.seed = 12;
    CHECK(synth_scene(spec).image == synth_scene(spec).image);
    SceneSpec other = spec;
    other.seed = 13;
    CHECK_FALSE(synth_scene(spec).image == synth_scene(other).image);
}

TEST_CASE("invalid scene specs are rejected") {
    SceneSpec s;
    s.shadow = {30, 40, 28, 36};
    CHECK_THROWS_AS(synth_scene(s), InvalidInput);
    s = {};
    s.target = {26, 70, 28, 36};
    CHECK_THROWS_AS(synth_scene(s), InvalidInput);
    s = {};
    s.background_gamma = {0.8, 5.0};
    CHECK_THROWS_AS(synth_scene(s), InvalidInput);
}

TEST_CASE("noiseless full acquisition inverts exactly") {
    const Scene s = synth_scene(SceneSpec{});
    const MeasurementVector m = simulate_acquisition(s.image, full_mask(64, 64), {}, 1);
    CHECK(frobenius_distance(measurement_adjoint(m), s.image) < 1e-12 * frobenius_norm(s.image));
}

TEST_CASE("noise has the requested standard deviation on kept cells only") {
    const Scene s = synth_scene(large_spec(6));
    const auto mask = make_mask({MaskKind::Mask1, 0.7, 1, 1}, 128, 128, 2);
    REQUIRE(mask->count() >= 10000);
    const MeasurementVector clean = measurement_forward(s.image, mask);
    const NoiseSpec noise = NoiseSpec::relative_to(clean, 0.1);
    const MeasurementVector noisy = simulate_acquisition(s.image, mask, noise, 3);
    REQUIRE(noisy.size() == mask->count());
    double e2 = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) e2 += std::norm(noisy.values()[i] - clean.values()[i]);
    const double sd = std::sqrt(e2 / static_cast<double>(noisy.size()));
    CHECK(std::abs(sd - noise.sigma) <= 0.05 * noise.sigma);
    CHECK(simulate_acquisition(s.image, mask, noise, 3).values()[0] == noisy.values()[0]);
}
