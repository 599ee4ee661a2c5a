#include <doctest.h>

#include <cmath>

#include "semsar/features.hpp"
#include "support.hpp"

using namespace semsar;

namespace {

struct ClassSample {
    Label label;
    GammaFeature truth;
};

// Three blocks of Gamma magnitudes with stated shape/scale, n pixels each.
std::pair<ComplexImage, LabelMap> three_class_image(std::size_t n, std::uint64_t seed,
                                                    const std::array<ClassSample, 3>& classes) {
    ComplexImage g(3, n);
    LabelMap y(3, n);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto x = test::gamma_samples(classes[k].truth.shape, classes[k].truth.scale, n, seed + k);
        for (std::size_t i = 0; i < n; ++i) {
            g(k, i) = x[i];
            y.set(k, i, classes[k].label);
        }
    }
    return {g, y};
}

void check_ordering(const ComplexImage& g, const LabelMap& y, const SemanticFeatures& th, double eps) {
    double t_max = -INFINITY, b_min = INFINITY, b_max = -INFINITY, s_min = INFINITY;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const GammaFeature f = th[y[i]];
        const double w = 1.0 / f.scale + (1.0 - f.shape) / (std::abs(g[i]) + eps);
        switch (y[i]) {
        case Label::Target: t_max = std::max(t_max, w); break;
        case Label::Background:
            b_min = std::min(b_min, w);
            b_max = std::max(b_max, w);
            break;
        case Label::Shadow: s_min = std::min(s_min, w); break;
        }
    }
    CHECK(t_max <= b_min);
    if (th.has(Label::Shadow)) CHECK(b_max <= s_min);
}

} // namespace

TEST_CASE("approximate shape MLE agrees with the numerical maximiser") {
    for (double a : {0.3, 0.5, 0.7, 1.0}) {
        const auto x = test::gamma_samples(a, 2.0, 100000, 17);
        double sum = 0.0, sum_log = 0.0;
        for (double v : x) {
            sum += v;
            sum_log += std::log(v);
        }
        const double n = static_cast<double>(x.size());
        const double est = shape_mle_approx(x.size(), sum / n, sum_log / n);
        CHECK(std::abs(est - test::gamma_shape_mle_numeric(x)) <= 0.02);
        CHECK(std::abs(est - a) <= 0.02);
        CHECK(scale_update(sum / n, std::min(est, 1.0)) == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("degenerate samples are reported") {
    CHECK_THROWS_AS(shape_mle_approx(0, 1.0, 0.0), DegenerateInput);
    CHECK_THROWS_AS(shape_mle_approx(10, 2.0, std::log(2.0)), DegenerateInput);
    CHECK_THROWS_AS(scale_update(0.0, 0.5), DegenerateInput);
    CHECK_THROWS_AS(scale_update(1.0, 1.5), InvalidInput);
}

TEST_CASE("class stats aggregate per label") {
    ComplexImage g(1, 4);
    g[0] = 1.0;
    g[1] = cplx(0.0, 2.0);
    g[2] = 3.0;
    g[3] = 0.5;
    LabelMap y(1, 4);
    y.set(0, Label::Target);
    y.set(1, Label::Target);
    const ClassStats st = class_stats(g, y, 0.1);
    CHECK(st[Label::Target].count == 2);
    CHECK(st[Label::Target].mean == doctest::Approx(1.5));
    CHECK(st[Label::Target].mean_log == doctest::Approx((std::log(1.1) + std::log(2.1)) / 2));
    CHECK(st[Label::Background].min == 0.5);
    CHECK(st[Label::Background].max == 3.0);
    CHECK(st[Label::Shadow].empty());
}

TEST_CASE("feature update recovers class features when no constraint is active") {
    // A target-only image has no neighbouring class to order against.
    const double eps = 1e-9;
    std::uint64_t seed = 3;
    for (GammaFeature truth : {GammaFeature{0.9, 0.05}, GammaFeature{0.8, 0.3}, GammaFeature{0.6, 2.0}}) {
        const auto x = test::gamma_samples(truth.shape, truth.scale, 6000, seed++);
        ComplexImage g(60, 100);
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i];
        const FeatureUpdate fu = feature_update(g, LabelMap(60, 100, Label::Target), eps, SemanticFeatures{});
        REQUIRE_FALSE(fu.fallback);
        CHECK_FALSE(fu.features.has(Label::Background));
        CHECK(std::abs(fu.features[Label::Target].shape - truth.shape) <= 0.1);
        CHECK(std::abs(fu.features[Label::Target].scale - truth.scale) <= 0.15 * truth.scale);
    }
}

TEST_CASE("overlapping class draws still yield ordered weights and exact means") {
    const std::array<ClassSample, 3> cls{{{Label::Shadow, {0.9, 0.05}},
                                          {Label::Background, {0.8, 0.3}},
                                          {Label::Target, {0.6, 2.0}}}};
    const auto [g, y] = three_class_image(6000, 3, cls);
    const double eps = 1e-3;
    const FeatureUpdate fu = feature_update(g, y, eps, SemanticFeatures{});
    check_ordering(g, y, fu.features, eps);
    for (const auto& c : cls)
        CHECK(fu.features[c.label].mean() == doctest::Approx(class_stats(g, y, eps)[c.label].mean));
}

TEST_CASE("updated features keep the weight ordering") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const std::array<ClassSample, 3> cls{{{Label::Shadow, {0.7, 0.1}},
                                              {Label::Background, {0.5, 0.5}},
                                              {Label::Target, {0.4, 3.0}}}};
        const auto [g, y] = three_class_image(500, 100 + 3 * s, cls);
        const double eps = 1e-3;
        const FeatureUpdate fu = feature_update(g, y, eps, SemanticFeatures{});
        check_ordering(g, y, fu.features, eps);
        for (std::size_t k = 1; k < fu.objective.size() && !fu.fallback; ++k)
            CHECK(fu.objective[k] <= fu.objective[k - 1] + 1e-9 * std::abs(fu.objective[k - 1]));
    }
}

TEST_CASE("feasible set bounds match the extreme weights") {
    const std::array<ClassSample, 3> cls{{{Label::Shadow, {0.9, 0.05}},
                                          {Label::Background, {0.8, 0.3}},
                                          {Label::Target, {0.6, 2.0}}}};
    const auto [g, y] = three_class_image(300, 9, cls);
    const double eps = 1e-3;
    const ClassStats st = class_stats(g, y, eps);
    const SemanticFeatures cur = SemanticFeatures::uniform(0.7, 1.0);
    const ShapeInterval iv = shape_feasible_set(Label::Target, st, cur);
    REQUIRE_FALSE(iv.empty);
    CHECK(iv.lo > 0.0);
    CHECK(iv.hi <= 1.0);
    const double b_min = class_min_weight(st[Label::Background], 0.7, eps);
    CHECK(class_max_weight(st[Label::Target], iv.hi, eps) <= b_min * (1 + 1e-12));
    if (iv.hi < 1.0) CHECK(class_max_weight(st[Label::Target], iv.hi * (1 + 1e-6), eps) > b_min);
}

TEST_CASE("overlapping classes fall back to unit shapes with ordered scales") {
    // Background contains both the smallest and the largest magnitude, so no
    // shape can separate it from the target.
    ComplexImage g(1, 6);
    LabelMap y(1, 6);
    const double v[6] = {1.0, 1.2, 0.9, 1e-4, 50.0, 0.5};
    for (std::size_t i = 0; i < 6; ++i) g[i] = v[i];
    y.set(0, Label::Target);
    y.set(1, Label::Target);
    y.set(2, Label::Target);
    const FeatureUpdate fu = feature_update(g, y, 1e-6, SemanticFeatures{});
    if (fu.fallback) {
        CHECK_FALSE(fu.features.constrained());
        CHECK(fu.features[Label::Target].shape == 1.0);
        CHECK(fu.features[Label::Background].shape == 1.0);
        CHECK(fu.features[Label::Target].scale >= fu.features[Label::Background].scale);
    }
    check_ordering(g, y, fu.features, 1e-6);
}

TEST_CASE("an empty target class cannot be updated") {
    const ComplexImage g(4, 4, cplx(1.0));
    CHECK_THROWS_AS(feature_update(g, LabelMap(4, 4), 1e-3, SemanticFeatures{}), DegenerateInput);
}

TEST_CASE("gamma objective equals the summed negative log-likelihood") {
    const std::array<ClassSample, 3> cls{{{Label::Shadow, {0.9, 0.05}},
                                          {Label::Background, {0.8, 0.3}},
                                          {Label::Target, {0.6, 2.0}}}};
    const auto [g, y] = three_class_image(50, 21, cls);
    const double eps = 1e-3;
    SemanticFeatures th;
    for (const auto& c : cls) th.set(c.label, c.truth);
    double ref = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const GammaFeature f = th[y[i]];
        const double m = std::abs(g[i]);
        ref += std::lgamma(f.shape) + f.shape * std::log(f.scale) + m / f.scale + (1 - f.shape) * std::log(m + eps);
    }
    CHECK(gamma_objective(class_stats(g, y, eps), th) == doctest::Approx(ref).epsilon(1e-12));
}
