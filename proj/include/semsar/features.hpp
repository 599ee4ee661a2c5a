#pragma once

#include <array>
#include <optional>
#include <vector>

#include "semsar/grid.hpp"
#include "semsar/label_map.hpp"

namespace semsar {

/// Gamma shape a (0 < a <= 1) and scale b (> 0) of one semantic class.
struct GammaFeature {
    double shape = 1.0;
    double scale = 1.0;

    double mean() const noexcept { return shape * scale; }
};

/// Per-class Gamma features. Classes without pixels are inactive.
class SemanticFeatures {
public:
    SemanticFeatures() = default;

    bool has(Label l) const noexcept { return active_[index(l)]; }
    const GammaFeature& operator[](Label l) const;
    void set(Label l, GammaFeature f);
    void clear(Label l) noexcept { active_[index(l)] = false; }
    int active_count() const noexcept;

    /// False when the last update fell back to a_c = 1 because some
    /// feasible interval was empty.
    bool constrained() const noexcept { return constrained_; }
    void set_constrained(bool v) noexcept { constrained_ = v; }

    static SemanticFeatures uniform(double shape, double scale, bool with_shadow = true);

private:
    std::array<GammaFeature, 3> f_{};
    std::array<bool, 3> active_{false, false, false};
    bool constrained_ = true;
};

/// Aggregates of |g| for one class. min/max are raw magnitudes; the mean of
/// log(|g| + eps) uses the shared epsilon.
struct ClassSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double mean_log = 0.0;
    double sum = 0.0;
    double sum_log = 0.0;

    bool empty() const noexcept { return count == 0; }
};

struct ClassStats {
    std::array<ClassSummary, 3> per_class{};
    double eps = 0.0;

    const ClassSummary& operator[](Label l) const noexcept { return per_class[index(l)]; }
};

ClassStats class_stats(const ComplexImage& g, const LabelMap& y, double eps);

/// b = mu / a
double scale_update(double mean, double shape);

/// Closed-form approximation to the Gamma shape MLE with
/// s = log(mean) - mean_log.
double shape_mle_approx(std::size_t count, double mean, double mean_log);

/// Closed interval [lo, hi] inside (0, 1].
struct ShapeInterval {
    double lo = 0.0;
    double hi = 1.0;
    bool empty = false;

    double clamp(double a) const noexcept { return a < lo ? lo : (a > hi ? hi : a); }
};

/// Smallest admissible shape; keeps the interval strictly inside (0, 1].
inline constexpr double kMinShape = 1e-6;

/// Range of a_c that keeps the class-c weights on the right side of the
/// neighbouring classes' extreme weights, with those classes held at their
/// values in `current`. Ordering is target < background < shadow. In
/// two-class mode (no shadow) only the target/background pair is used.
ShapeInterval shape_feasible_set(Label c, const ClassStats& stats, const SemanticFeatures& current);

/// Largest and smallest weight over class c for a given shape, using
/// b = mu / a, i.e. w = a/mu + (1 - a)/(|g| + eps).
double class_max_weight(const ClassSummary& s, double shape, double eps);
double class_min_weight(const ClassSummary& s, double shape, double eps);

/// Negative log-likelihood summed over active classes:
/// N log G(a) + N a log b + sum|g|/b + (1 - a) sum log(|g| + eps).
double gamma_objective(const ClassStats& stats, const SemanticFeatures& theta);

struct FeatureConfig {
    double tol = 1e-6;
    int max_passes = 20;
};

struct FeatureUpdate {
    SemanticFeatures features;
    std::vector<double> objective; // after each pass
    int passes = 0;
    bool fallback = false;
};

/// Coordinate updates a_t, a_b, a_s (clipped into their feasible sets), then
/// b_c = mu_c / a_c. Falls back to a_c = 1 with ordered scales when a feasible
/// set is empty. Throws DegenerateInput if the target class is empty.
FeatureUpdate feature_update(const ComplexImage& g, const LabelMap& y, double eps, const SemanticFeatures& previous,
                             const FeatureConfig& cfg = {});

} // namespace semsar
