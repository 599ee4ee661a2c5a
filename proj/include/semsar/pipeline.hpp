#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "semsar/features.hpp"
#include "semsar/label_map.hpp"
#include "semsar/model.hpp"
#include "semsar/semantics.hpp"
#include "semsar/solver.hpp"

namespace semsar {

/// min(e^k / lambda0, lambda)
double lambda_schedule(int k, double lambda0, double lambda);

/// Median magnitude of g0, falling back to the RMS magnitude and then to 1.
double clutter_level(const ComplexImage& g0);

/// factor * r~ on the same mask.
MeasurementVector scaled(const MeasurementVector& m, double factor);

struct PipelineConfig {
    /// Final regularisation weight reached by the schedule (in units of the
    /// clutter level when `normalise` is set).
    double lambda = 0.1;
    double lambda0 = 50.0;
    /// Divide r~ by clutter_level(A* Phi* r~) before solving and rescale the
    /// result, so lambda is independent of the overall image amplitude.
    bool normalise = true;
    double beta = 1.0;
    int max_iter = 10;
    /// Iteration from which FCM runs with two clusters (target / other).
    int k_switch = 3;
    double shadow_floor = kShadowFloor;
    /// Relative image change below which the outer loop stops.
    double global_tol = 1e-3;
    SizePrior size_prior{};
    /// lambda inside is overwritten by the schedule each iteration.
    SolverConfig solver{};
    /// beta and seed inside are overwritten from this config.
    MrfConfig mrf{};
    FcmConfig fcm{};
    FeatureConfig features{};
    std::uint64_t seed = 0;
    bool keep_snapshots = false;

    void validate() const;
};

struct IterationDiagnostics {
    int k = 0;
    double lambda = 0.0;
    int clusters = 0;
    /// Labels altered by ICM relative to its FCM initialisation.
    std::size_t icm_changed = 0;
    int icm_sweeps = 0;
    /// Labels that differ from the previous iteration's refined map.
    std::size_t changed_labels = 0;
    double objective = 0.0;
    double variation = 0.0;
    int solver_iterations = 0;
    double eps = 0.0;
    bool feature_fallback = false;
    /// Set when size refinement removed every target pixel and the
    /// unrefined ICM map was kept instead.
    bool refinement_skipped = false;
    std::array<std::size_t, 3> class_counts{};
    SemanticFeatures features;
    /// Extremes of W per class (NaN for an absent class).
    std::array<double, 3> weight_min{};
    std::array<double, 3> weight_max{};
    /// Pixels with |g| < 0.05 max|g| among non-target pixels (truth labels
    /// when supplied, inferred labels otherwise).
    std::size_t near_zero_clutter = 0;
    std::optional<double> ptcr_db;
    std::optional<double> recall;
    std::optional<double> precision;
};

struct RunResult {
    ComplexImage image;
    LabelMap labels;
    SemanticFeatures features;
    std::vector<IterationDiagnostics> diagnostics;
    bool converged = false;
    std::vector<ComplexImage> image_snapshots;
    std::vector<LabelMap> label_snapshots;
    /// Factor r~ was divided by (1 when normalisation is off).
    double clutter_level = 1.0;
};

/// Target-oriented imaging: alternate image recovery, label inference,
/// size refinement, feature update and semantic reweighting with a
/// progressively increasing regularisation weight. `truth` only feeds the
/// diagnostics.
RunResult tar_imaging(const MeasurementVector& m, const PipelineConfig& cfg, const LabelMap* truth = nullptr);

} // namespace semsar
