#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semsar/datagen.hpp"
#include "semsar/metrics.hpp"
#include "semsar/pipeline.hpp"
#include "semsar/solver.hpp"

namespace semsar {

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// Zero-filled inverse transform A* Phi* r~ (the solvers' starting point).
ComplexImage pf_imaging(const MeasurementVector& m);

/// Weighted l1 with unit weights, started from pf_imaging.
SolveResult poi_imaging(const MeasurementVector& m, double lambda, const SolverConfig& base = {});

struct RegConfig {
    double lambda = 1.0;
    /// eps_tv = eps_relative * max|G0|.
    double eps_relative = 1e-3;
    int iterations = 500;

    void validate() const;
};

/// sum sqrt(|D_h g|^2 + |D_v g|^2 + eps^2), forward differences, Neumann boundary.
double tv_value(const ComplexImage& g, double eps);

/// Gradient descent on 1/(2 lambda)||r~ - Phi A G||^2 + TV_eps(G) with the
/// fixed step 1 / (1/lambda + 8/eps), started from pf_imaging.
SolveResult reg_imaging(const MeasurementVector& m, const RegConfig& cfg);

/// Reweighted l1 with magnitude weights 1/(|g| + eps), started from pf_imaging.
SolveResult std_irw_l1(const MeasurementVector& m, double lambda, const SolverConfig& base = {});

// ---------------------------------------------------------------------------
// Dispatch and comparison tables
// ---------------------------------------------------------------------------

enum class Algorithm { Pf, Poi, Reg, IrwL1, Tar };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct ReconstructConfig {
    /// Shared regularisation weight for poi, reg, irwl1 and the final
    /// value of the tar schedule.
    double lambda = PipelineConfig{}.lambda;
    /// Solve on r~ / clutter_level(A* Phi* r~) and rescale the result
    /// (all algorithms except pf).
    bool normalise = true;
    SolverConfig solver{};
    RegConfig reg{};
    PipelineConfig tar{};
};

struct Reconstruction {
    ComplexImage image;
    std::optional<SolveReport> report;
    std::optional<RunResult> run;
};

Reconstruction reconstruct(Algorithm a, const MeasurementVector& m, const ReconstructConfig& cfg,
                           std::uint64_t seed = 0, const LabelMap* truth = nullptr);

struct NamedScene {
    std::string name;
    Scene scene;
};

struct CompareSpec {
    std::vector<MaskSpec> masks;
    std::vector<Algorithm> algorithms;
    /// Noise sigma relative to the RMS of the clean measurement.
    double noise_relative = 0.0;
    std::uint64_t seed = 0;
    ReconstructConfig recon{};
};

struct CompareRow {
    std::string scene;
    Algorithm algorithm = Algorithm::Pf;
    MaskSpec mask{};
    MetricReport metrics{};
};

/// Cell index = scene * masks.size() + mask. The mask, the noise draw and the
/// tar seed of a cell derive from spec.seed and the cell index only.
MeasurementVector cell_measurement(const Scene& scene, const MaskSpec& mask, const CompareSpec& spec,
                                   std::size_t cell);
std::uint64_t cell_run_seed(const CompareSpec& spec, std::size_t cell);

/// One row per (scene, mask, algorithm) in that nesting order. Cells
/// (scene, mask) run concurrently; output order does not depend on threads.
std::vector<CompareRow> compare_table(const std::vector<NamedScene>& scenes, const CompareSpec& spec);

/// Per-(mask, algorithm) averages over scenes, labelled scene = "mean".
std::vector<CompareRow> mean_rows(const std::vector<CompareRow>& rows);

std::string_view csv_header();
std::string csv_row(const CompareRow& row);
/// Same layout with free-form names; empty mask fields when `mask` is unset.
std::string csv_row(std::string_view scene, std::string_view algorithm, const std::optional<MaskSpec>& mask,
                    const MetricReport& metrics);
/// Header, data rows and, when more than one scene is present, mean rows.
std::string to_csv(const std::vector<CompareRow>& rows);

} // namespace semsar
