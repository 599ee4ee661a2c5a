#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semsar/features.hpp"
#include "semsar/label_map.hpp"

namespace semsar {

// ---------------------------------------------------------------------------
// Fuzzy c-means on scalar magnitudes
// ---------------------------------------------------------------------------

struct FcmConfig {
    double fuzzifier = 2.0;
    double tol = 1e-5;
    int max_iter = 100;
};

struct FcmResult {
    int clusters = 0;
    std::vector<double> centers;
    /// Row-major n x clusters membership matrix.
    std::vector<double> memberships;
    std::vector<int> crisp;
    std::vector<double> objective;
    int iterations = 0;
};

/// Standard FCM with centres initialised at the 10/50/90 % magnitude
/// quantiles (10/90 % for two clusters). Deterministic.
FcmResult fcm_cluster(std::span<const double> magnitudes, int clusters, const FcmConfig& cfg = {});

/// Largest-mean cluster -> Target, smallest -> Shadow (three clusters),
/// the rest -> Background. Equal means are ordered by variance, then by
/// lower cluster index ranking higher.
LabelMap assign_semantic_labels(std::span<const int> crisp, std::span<const double> magnitudes, int clusters,
                                std::size_t rows, std::size_t cols);

// ---------------------------------------------------------------------------
// Directional pairwise MRF
//
// Rows are range with the row index increasing down-range. A target is
// expected directly beneath (larger row index than) its shadow.
// ---------------------------------------------------------------------------

enum class Orientation : std::uint8_t {
    Horizontal, // s and t share a row
    SAboveT,    // s has the smaller row index
    SBelowT,    // s has the larger row index
};

/// phi(y_s, y_t) for neighbouring sites s, t.
int pairwise_potential(Label s, Label t, Orientation o) noexcept;

/// Checks the transpose relation between the two vertical tables and the
/// symmetry of the horizontal one.
bool pairwise_tables_consistent() noexcept;

struct MrfConfig {
    double beta = 1.0;
    int max_sweeps = 20;
    double stop_changed_fraction = 0.001;
    std::uint64_t seed = 0;
    /// Magnitude floor inside the unary log term, relative to max|G|, used by
    /// the imaging pipeline. Exact zeros left by the sparse solver must not
    /// outweigh the neighbourhood prior.
    double eps_relative = 0.03;
};

/// -a log((|g| + eps)/b) + |g|/b + log Gamma(a) for one pixel and class.
double unary_energy(double magnitude, const GammaFeature& f, double eps);

/// Sum of unary terms plus beta * phi over each neighbouring pair once.
double label_energy(const ComplexImage& g, const SemanticFeatures& theta, const LabelMap& y, double beta,
                    double eps);

/// Conditional energy of assigning `candidate` at site i with all other
/// labels fixed (the quantity ICM minimises).
double site_energy(const ComplexImage& g, const SemanticFeatures& theta, const LabelMap& y, std::size_t i,
                   Label candidate, double beta, double eps);

struct IcmResult {
    LabelMap labels;
    std::vector<std::size_t> changed; // per sweep
    std::vector<double> energy;       // after each sweep; index 0 is the start
    int sweeps = 0;
};

/// Iterated conditional modes over the classes present in theta. Sites are
/// visited in a fresh seeded permutation each sweep; a label changes only if
/// that strictly lowers the site energy.
IcmResult icm_infer(const ComplexImage& g, const SemanticFeatures& theta, const LabelMap& init, const MrfConfig& cfg,
                    double eps);

// ---------------------------------------------------------------------------
// Post-processing
// ---------------------------------------------------------------------------

struct SizePrior {
    std::size_t min_area = 16;
    std::size_t max_area = 1024;

    void validate() const;
};

/// 4-connected target components with area outside [min_area, max_area]
/// become Background.
LabelMap refine_by_size(const LabelMap& labels, const SizePrior& prior);

inline constexpr double kShadowFloor = 0.005;

/// 2 once k >= k_switch or the shadow class falls under `shadow_floor` of the
/// pixels, 3 otherwise.
int collapse_check(const LabelMap& labels, int k, int k_switch, double shadow_floor = kShadowFloor);

} // namespace semsar
