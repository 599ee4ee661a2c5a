#include "semsar/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "semsar/kernels.hpp"

namespace semsar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_weights(const WeightMatrix& w, std::size_t rows, std::size_t cols) {
    if (w.rows() != rows || w.cols() != cols) throw InvalidInput("weight matrix shape does not match the image");
    for (double v : w.values())
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("weights must be finite and non-negative");
}

double weighted_l1(const ComplexImage& g, const WeightMatrix& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * std::abs(g[i]);
    return s;
}

} // namespace

WeightMatrix uniform_weights(std::size_t rows, std::size_t cols, double value) {
    return WeightMatrix(rows, cols, value);
}

void SolverConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("solver: lambda must be positive");
    if (eps && !(*eps > 0.0)) throw InvalidInput("solver: eps must be positive");
    if (!(eps_relative > 0.0)) throw InvalidInput("solver: eps_relative must be positive");
    if (fista_max_iter < 1 || mm_max_iter < 1) throw InvalidInput("solver: iteration limits must be >= 1");
    if (!(fista_tol >= 0.0) || !(mm_tol >= 0.0)) throw InvalidInput("solver: tolerances must be non-negative");
    if (!(lipschitz > 0.0)) throw InvalidInput("solver: Lipschitz constant must be positive");
}

double SolverConfig::resolve_eps(const ComplexImage& at) const {
    if (eps) return *eps;
    const double peak = max_magnitude(at);
    return eps_relative * (peak > 0.0 ? peak : 1.0);
}

PartialFourierModel::PartialFourierModel(const MeasurementVector& m) : m_(m), back_(measurement_adjoint(m)) {}

ComplexImage PartialFourierModel::normal(const ComplexImage& x) const { return measurement_normal(x, m_.mask()); }

double PartialFourierModel::residual_sq(const ComplexImage& x) const {
    const PhaseHistory spec = dft2_forward(x);
    const auto& mask = m_.mask();
    const auto data = m_.values();
    double s = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (mask.kept(i)) s += std::norm(data[j++] - spec[i]);
    return s;
}

double IdentityModel::residual_sq(const ComplexImage& x) const {
    const double d = frobenius_distance(data_, x);
    return d * d;
}

ComplexImage complex_soft_threshold(const ComplexImage& x, double lambda, const WeightMatrix& w) {
    if (!(lambda >= 0.0)) throw InvalidInput("complex_soft_threshold: lambda must be non-negative");
    if (!x.same_shape(w)) throw InvalidInput("complex_soft_threshold: shape mismatch");
    ComplexImage out(x.rows(), x.cols());
    kernels::omp::soft_threshold(x.values(), lambda, w.values(), out.values());
    return out;
}

double weighted_l1_objective(const LinearModel& model, const ComplexImage& g, const WeightMatrix& w, double lambda) {
    return model.residual_sq(g) / (2.0 * lambda) + weighted_l1(g, w);
}

double next_momentum(double alpha) { return (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha)) / 2.0; }

SolveResult fista_weighted_l1(const LinearModel& model, const WeightMatrix& w, const SolverConfig& cfg,
                              const ComplexImage& init) {
    cfg.validate();
    const auto t0 = Clock::now();
    if (init.rows() != model.rows() || init.cols() != model.cols()) {
        throw InvalidInput("fista: initial image shape does not match the model");
    }
    if (!init.all_finite()) throw InvalidInput("fista: initial image is not finite");
    check_weights(w, model.rows(), model.cols());

    const double step = 1.0 / cfg.lipschitz;
    const double threshold = cfg.lambda / cfg.lipschitz;
    const ComplexImage& back = model.back_projection();

    SolveResult out;
    auto& rep = out.report;
    auto objective = [&](const ComplexImage& g) { return weighted_l1_objective(model, g, w, cfg.lambda); };

    ComplexImage y = init;
    ComplexImage hat_prev = init;
    ComplexImage z(init.rows(), init.cols());
    ComplexImage hat(init.rows(), init.cols());
    double alpha = 1.0;
    double f_prev = objective(init);
    rep.objective.push_back(f_prev);
    ComplexImage best = init;
    double f_best = f_prev;

    for (int t = 1; t <= cfg.fista_max_iter; ++t) {
        const ComplexImage n = model.normal(y);
        kernels::omp::gradient_step(y.values(), n.values(), back.values(), step, z.values());
        kernels::omp::soft_threshold(z.values(), threshold, w.values(), hat.values());
        const double alpha_next = next_momentum(alpha);
        kernels::omp::extrapolate(hat.values(), hat_prev.values(), (alpha - 1.0) / alpha_next, y.values());
        alpha = alpha_next;

        const double f = objective(hat);
        rep.objective.push_back(f);
        rep.iterations = t;
        if (!std::isfinite(f)) {
            throw SolverFailure("fista: objective became non-finite at iteration " + std::to_string(t),
                                rep.objective);
        }
        if (f < f_best) {
            f_best = f;
            best = hat;
        }
        const double rel = std::abs(f_prev - f) / std::max(std::abs(f_prev), std::numeric_limits<double>::min());
        std::swap(hat_prev, hat);
        f_prev = f;
        if (rel < cfg.fista_tol) {
            rep.converged = true;
            break;
        }
    }

    rep.residual = std::sqrt(model.residual_sq(best));
    rep.wall_seconds = seconds_since(t0);
    out.image = std::move(best);
    return out;
}

SolveResult fista_weighted_l1(const MeasurementVector& m, const WeightMatrix& w, const SolverConfig& cfg,
                              const ComplexImage& init) {
    const PartialFourierModel model(m);
    return fista_weighted_l1(model, w, cfg, init);
}

WeightMatrix magnitude_weights(const ComplexImage& g, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("magnitude_weights: eps must be positive");
    WeightMatrix out(g.rows(), g.cols());
    kernels::omp::magnitude_weights(g.values(), eps, out.values());
    return out;
}

namespace {

kernels::ClassTable class_table(const LabelMap& y, const SemanticFeatures& theta) {
    kernels::ClassTable table{};
    for (Label l : kAllLabels) {
        if (!theta.has(l)) {
            if (y.count(l) > 0) {
                throw InvalidInput("semantic_weights: label map uses class '" + std::string(to_string(l)) +
                                   "' which has no features");
            }
            continue;
        }
        const auto& f = theta[l];
        table[index(l)] = {1.0 / f.scale, 1.0 - f.shape};
    }
    return table;
}

} // namespace

WeightMatrix semantic_weights(const ComplexImage& g, const LabelMap& y, const SemanticFeatures& theta, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("semantic_weights: eps must be positive");
    if (!y.same_shape(g)) throw InvalidInput("semantic_weights: image and label shapes differ");
    const auto table = class_table(y, theta);
    WeightMatrix out(g.rows(), g.cols());
    kernels::omp::semantic_weights(g.values(), y.raw(), table, eps, out.values());
    return out;
}

double MagnitudeRule::penalty(const ComplexImage& g, double eps) const {
    double s = 0.0;
    for (const auto& v : g.values()) s += std::log(std::abs(v) + eps);
    return s;
}

SemanticRule::SemanticRule(LabelMap labels, SemanticFeatures theta)
    : labels_(std::move(labels)), theta_(std::move(theta)) {
    class_table(labels_, theta_);
}

WeightMatrix SemanticRule::weights(const ComplexImage& g, double eps) const {
    return semantic_weights(g, labels_, theta_, eps);
}

double SemanticRule::penalty(const ComplexImage& g, double eps) const {
    if (!labels_.same_shape(g)) throw InvalidInput("SemanticRule: image and label shapes differ");
    const auto table = class_table(labels_, theta_);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& c = table[labels_.raw()[i]];
        const double m = std::abs(g[i]);
        s += m * c.inv_scale + c.shape_term * std::log(m + eps);
    }
    return s;
}

double nonconvex_objective(const LinearModel& model, const ReweightingRule& rule, const ComplexImage& g,
                           double lambda, double eps) {
    return model.residual_sq(g) / (2.0 * lambda) + rule.penalty(g, eps);
}

SolveResult irw_l1(const LinearModel& model, const ReweightingRule& rule, const SolverConfig& cfg,
                   const ComplexImage& init) {
    cfg.validate();
    const auto t0 = Clock::now();
    const double eps = cfg.resolve_eps(init);

    SolveResult out;
    auto& rep = out.report;
    rep.eps = eps;
    ComplexImage g = init;
    rep.nonconvex_objective.push_back(nonconvex_objective(model, rule, g, cfg.lambda, eps));
    WeightMatrix w = rule.weights(g, eps);

    for (int outer = 1; outer <= cfg.mm_max_iter; ++outer) {
        SolveResult inner = fista_weighted_l1(model, w, cfg, g);
        const double norm = frobenius_norm(inner.image);
        const double var = frobenius_distance(inner.image, g) / std::max(norm, std::numeric_limits<double>::min());
        g = std::move(inner.image);
        rep.objective = std::move(inner.report.objective);
        rep.inner_iterations.push_back(inner.report.iterations);
        rep.variation.push_back(var);
        rep.nonconvex_objective.push_back(nonconvex_objective(model, rule, g, cfg.lambda, eps));
        rep.iterations = outer;
        if (var < cfg.mm_tol) {
            rep.converged = true;
            break;
        }
        w = rule.weights(g, eps);
    }

    rep.residual = std::sqrt(model.residual_sq(g));
    rep.wall_seconds = seconds_since(t0);
    out.image = std::move(g);
    return out;
}

SolveResult irw_l1(const MeasurementVector& m, const ReweightingRule& rule, const SolverConfig& cfg,
                   const ComplexImage& init) {
    const PartialFourierModel model(m);
    return irw_l1(model, rule, cfg, init);
}

} // namespace semsar
