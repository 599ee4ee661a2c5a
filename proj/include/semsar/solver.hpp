#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "semsar/features.hpp"
#include "semsar/label_map.hpp"
#include "semsar/model.hpp"

namespace semsar {

/// Non-negative per-pixel penalty weights.
using WeightMatrix = RealGrid;

WeightMatrix uniform_weights(std::size_t rows, std::size_t cols, double value = 1.0);

struct SolverConfig {
    /// Regularisation weight: objective is 1/(2 lambda) ||r - PhiA G||^2 + sum w|g|.
    double lambda = 1.0;
    /// Fixed smoothing constant; when unset, eps = eps_relative * max|G| of
    /// the starting point of each reweighting run.
    std::optional<double> eps;
    double eps_relative = 1e-3;
    double fista_tol = 1e-6;
    int fista_max_iter = 200;
    double mm_tol = 1e-4;
    int mm_max_iter = 10;
    /// Lipschitz constant of the data-term gradient; 1 for the unitary model.
    double lipschitz = 1.0;

    void validate() const;
    double resolve_eps(const ComplexImage& at) const;
};

struct SolveReport {
    /// FISTA: objective after each iteration (index 0 is the start point).
    std::vector<double> objective;
    /// Reweighting: inner FISTA iterations per outer step.
    std::vector<int> inner_iterations;
    /// Reweighting: non-convex objective at the start and after each outer step.
    std::vector<double> nonconvex_objective;
    /// Reweighting: ||G(t+1) - G(t)||_F / ||G(t+1)||_F per outer step.
    std::vector<double> variation;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
    double eps = 0.0;
    double wall_seconds = 0.0;
};

struct SolveResult {
    ComplexImage image;
    SolveReport report;
};

/// Data model seen by the solvers: gradient pieces of 1/2 ||d - H G||^2.
class LinearModel {
public:
    virtual ~LinearModel() = default;
    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    /// H* H x
    virtual ComplexImage normal(const ComplexImage& x) const = 0;
    /// H* d
    virtual const ComplexImage& back_projection() const = 0;
    /// ||d - H x||^2
    virtual double residual_sq(const ComplexImage& x) const = 0;
};

/// H = Phi A over a sampling mask.
class PartialFourierModel final : public LinearModel {
public:
    explicit PartialFourierModel(const MeasurementVector& m);
    std::size_t rows() const override { return m_.rows(); }
    std::size_t cols() const override { return m_.cols(); }
    ComplexImage normal(const ComplexImage& x) const override;
    const ComplexImage& back_projection() const override { return back_; }
    double residual_sq(const ComplexImage& x) const override;

private:
    MeasurementVector m_;
    ComplexImage back_;
};

/// H = I (denoising); used to check the solver against closed-form proxes.
class IdentityModel final : public LinearModel {
public:
    explicit IdentityModel(ComplexImage data) : data_(std::move(data)) {}
    std::size_t rows() const override { return data_.rows(); }
    std::size_t cols() const override { return data_.cols(); }
    ComplexImage normal(const ComplexImage& x) const override { return x; }
    const ComplexImage& back_projection() const override { return data_; }
    double residual_sq(const ComplexImage& x) const override;

private:
    ComplexImage data_;
};

/// Proximal map of lambda * sum w_i |x_i|: magnitude shrinks by lambda w,
/// phase is kept.
ComplexImage complex_soft_threshold(const ComplexImage& x, double lambda, const WeightMatrix& w);

/// 1/(2 lambda) ||d - H G||^2 + sum w|g|
double weighted_l1_objective(const LinearModel& model, const ComplexImage& g, const WeightMatrix& w, double lambda);

/// FISTA momentum sequence: alpha(t+1) = (1 + sqrt(1 + 4 alpha(t)^2)) / 2.
double next_momentum(double alpha);

/// Accelerated proximal gradient for the weighted-l1 problem. Returns the
/// lowest-objective point seen, so the result never scores worse than init.
SolveResult fista_weighted_l1(const LinearModel& model, const WeightMatrix& w, const SolverConfig& cfg,
                              const ComplexImage& init);
SolveResult fista_weighted_l1(const MeasurementVector& m, const WeightMatrix& w, const SolverConfig& cfg,
                              const ComplexImage& init);

WeightMatrix magnitude_weights(const ComplexImage& g, double eps);
WeightMatrix semantic_weights(const ComplexImage& g, const LabelMap& y, const SemanticFeatures& theta, double eps);

/// Concave penalty majorised by its tangent at each reweighting step.
class ReweightingRule {
public:
    virtual ~ReweightingRule() = default;
    virtual WeightMatrix weights(const ComplexImage& g, double eps) const = 0;
    /// Penalty value whose tangent at g yields weights(g, eps).
    virtual double penalty(const ComplexImage& g, double eps) const = 0;
};

/// sum log(|g| + eps); weights 1/(|g| + eps).
class MagnitudeRule final : public ReweightingRule {
public:
    WeightMatrix weights(const ComplexImage& g, double eps) const override { return magnitude_weights(g, eps); }
    double penalty(const ComplexImage& g, double eps) const override;
};

/// sum |g_i|/b_c + (1 - a_c) log(|g_i| + eps) over the label map.
class SemanticRule final : public ReweightingRule {
public:
    SemanticRule(LabelMap labels, SemanticFeatures theta);
    WeightMatrix weights(const ComplexImage& g, double eps) const override;
    double penalty(const ComplexImage& g, double eps) const override;

private:
    LabelMap labels_;
    SemanticFeatures theta_;
};

/// Majorisation-minimisation: weighted-l1 solve, reweight at the new point,
/// repeat until the relative image change drops below mm_tol.
SolveResult irw_l1(const LinearModel& model, const ReweightingRule& rule, const SolverConfig& cfg,
                   const ComplexImage& init);
SolveResult irw_l1(const MeasurementVector& m, const ReweightingRule& rule, const SolverConfig& cfg,
                   const ComplexImage& init);

/// 1/(2 lambda) ||d - H G||^2 + rule.penalty(G)
double nonconvex_objective(const LinearModel& model, const ReweightingRule& rule, const ComplexImage& g,
                           double lambda, double eps);

} // namespace semsar
