#include "semsar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semsar/metrics.hpp"
#include "semsar/random.hpp"

namespace semsar {

double lambda_schedule(int k, double lambda0, double lambda) {
    if (k < 0) throw InvalidInput("lambda_schedule: k must be non-negative");
    if (!(lambda0 > 0.0) || !(lambda > 0.0)) throw InvalidInput("lambda_schedule: parameters must be positive");
    return std::min(std::exp(static_cast<double>(k)) / lambda0, lambda);
}

double clutter_level(const ComplexImage& g0) {
    const RealGrid mags = magnitudes(g0);
    std::vector<double> x(mags.values().begin(), mags.values().end());
    if (x.empty()) return 1.0;
    const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
    std::nth_element(x.begin(), mid, x.end());
    double s = *mid;
    if (!(s > 0.0)) s = frobenius_norm(g0) / std::sqrt(static_cast<double>(x.size()));
    return s > 0.0 && std::isfinite(s) ? s : 1.0;
}

MeasurementVector scaled(const MeasurementVector& m, double factor) {
    std::vector<cplx> v(m.values().begin(), m.values().end());
    for (auto& x : v) x *= factor;
    return MeasurementVector(std::move(v), m.mask_ptr());
}

void PipelineConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("pipeline: lambda must be positive");
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw InvalidInput("pipeline: lambda0 must be positive");
    if (!(beta >= 0.0)) throw InvalidInput("pipeline: beta must be non-negative");
    if (max_iter < 1) throw InvalidInput("pipeline: max_iter must be >= 1");
    if (k_switch < 1) throw InvalidInput("pipeline: k_switch must be >= 1");
    if (!(mrf.eps_relative > 0.0)) throw InvalidInput("pipeline: mrf.eps_relative must be positive");
    if (!(global_tol >= 0.0)) throw InvalidInput("pipeline: global_tol must be non-negative");
    size_prior.validate();
    SolverConfig s = solver;
    s.lambda = lambda;
    s.validate();
}

namespace {

struct Labelling {
    LabelMap fcm;
    int clusters = 0;
};

// FCM on magnitudes, falling back to two clusters when the shadow class
// would be (nearly) empty.
Labelling infer_initial_labels(const ComplexImage& g, int clusters, const PipelineConfig& cfg) {
    const RealGrid mags = magnitudes(g);
    const auto x = mags.values();
    Labelling out;
    for (int c = clusters; c >= 2; --c) {
        const FcmResult fcm = fcm_cluster(x, c, cfg.fcm);
        out.fcm = assign_semantic_labels(fcm.crisp, x, c, g.rows(), g.cols());
        out.clusters = c;
        if (c == 2) break;
        const double shadow = static_cast<double>(out.fcm.count(Label::Shadow));
        if (shadow >= cfg.shadow_floor * static_cast<double>(g.size())) break;
    }
    return out;
}

// Features handed to ICM: previous shapes (1 initially) with scales that
// reproduce each FCM class mean.
SemanticFeatures icm_features(const ComplexImage& g, const LabelMap& y, double eps, const SemanticFeatures& prev) {
    const ClassStats st = class_stats(g, y, eps);
    SemanticFeatures theta;
    for (Label l : kAllLabels) {
        if (st[l].empty()) continue;
        const double a = prev.has(l) ? prev[l].shape : 1.0;
        theta.set(l, {a, std::max(st[l].mean, eps) / a});
    }
    return theta;
}

void scale_in_place(ComplexImage& g, double s) {
    for (auto& v : g.values()) v *= s;
}

RunResult run_unscaled(const MeasurementVector& m, const PipelineConfig& cfg, const LabelMap* truth);

void weight_extremes(const WeightMatrix& w, const LabelMap& y, IterationDiagnostics& d) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    d.weight_min.fill(nan);
    d.weight_max.fill(nan);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const std::size_t c = index(y[i]);
        if (std::isnan(d.weight_min[c])) {
            d.weight_min[c] = d.weight_max[c] = w[i];
        } else {
            d.weight_min[c] = std::min(d.weight_min[c], w[i]);
            d.weight_max[c] = std::max(d.weight_max[c], w[i]);
        }
    }
}

} // namespace

RunResult tar_imaging(const MeasurementVector& m, const PipelineConfig& cfg, const LabelMap* truth) {
    cfg.validate();
    if (!cfg.normalise) return run_unscaled(m, cfg, truth);
    const double s = clutter_level(measurement_adjoint(m));
    RunResult out = run_unscaled(scaled(m, 1.0 / s), cfg, truth);
    scale_in_place(out.image, s);
    for (auto& g : out.image_snapshots) scale_in_place(g, s);
    out.clutter_level = s;
    return out;
}

namespace {

RunResult run_unscaled(const MeasurementVector& m, const PipelineConfig& cfg, const LabelMap* truth) {
    if (truth && (truth->rows() != m.rows() || truth->cols() != m.cols())) {
        throw InvalidInput("tar_imaging: truth labels do not match the measurement grid");
    }
    const PartialFourierModel model(m);
    RunResult out;
    ComplexImage g = model.back_projection();
    WeightMatrix w = uniform_weights(m.rows(), m.cols());
    SemanticFeatures theta = SemanticFeatures::uniform(1.0, 1.0, true);
    LabelMap y;
    bool have_labels = false;

    for (int k = 1; k <= cfg.max_iter; ++k) {
        IterationDiagnostics d;
        d.k = k;
        d.lambda = lambda_schedule(k, cfg.lambda0, cfg.lambda);
        SolverConfig sc = cfg.solver;
        sc.lambda = d.lambda;

        // Image recovery.
        SolveResult res;
        if (!have_labels) {
            res = fista_weighted_l1(model, w, sc, g);
            d.objective = res.report.objective.back();
            d.solver_iterations = res.report.iterations;
        } else {
            const SemanticRule rule(y, theta);
            res = irw_l1(model, rule, sc, g);
            d.objective = res.report.nonconvex_objective.back();
            d.solver_iterations = res.report.iterations;
        }
        const double norm = frobenius_norm(res.image);
        d.variation = frobenius_distance(res.image, g) / std::max(norm, std::numeric_limits<double>::min());
        g = std::move(res.image);
        const double eps = sc.resolve_eps(g);
        d.eps = eps;

        // Label inference. A constant image carries no semantic structure;
        // the loop ends with the labels it had.
        const int wanted = have_labels ? collapse_check(y, k, cfg.k_switch, cfg.shadow_floor)
                                       : (k >= cfg.k_switch ? 2 : 3);
        Labelling init;
        try {
            init = infer_initial_labels(g, wanted, cfg);
        } catch (const DegenerateInput&) {
            out.diagnostics.push_back(d);
            break;
        }
        d.clusters = init.clusters;

        MrfConfig mc = cfg.mrf;
        mc.beta = cfg.beta;
        mc.seed = derive_seed(cfg.seed, "icm", static_cast<std::uint64_t>(k));
        SemanticFeatures icm_theta = icm_features(g, init.fcm, eps, theta);
        const double peak = max_magnitude(g);
        const double icm_eps = peak > 0.0 ? cfg.mrf.eps_relative * peak : eps;
        IcmResult icm = icm_infer(g, icm_theta, init.fcm, mc, icm_eps);
        d.icm_sweeps = icm.sweeps;
        d.icm_changed = count_changed(icm.labels, init.fcm);

        LabelMap refined = refine_by_size(icm.labels, cfg.size_prior);
        if (refined.count(Label::Target) == 0) {
            d.refinement_skipped = true;
            refined = icm.labels.count(Label::Target) > 0 ? std::move(icm.labels) : init.fcm;
        }
        d.changed_labels = have_labels ? count_changed(refined, y) : refined.size();
        y = std::move(refined);
        have_labels = true;

        // Feature and weight update.
        const FeatureUpdate fu = feature_update(g, y, eps, theta, cfg.features);
        theta = fu.features;
        d.feature_fallback = fu.fallback;
        d.features = theta;
        w = semantic_weights(g, y, theta, eps);
        weight_extremes(w, y, d);
        for (Label l : kAllLabels) d.class_counts[index(l)] = y.count(l);

        if (truth) {
            d.near_zero_clutter = near_zero_clutter(g, *truth);
            d.ptcr_db = ptcr_db(g, *truth);
            d.recall = target_recall(y, *truth);
            d.precision = target_precision(y, *truth);
        } else {
            d.near_zero_clutter = near_zero_clutter(g, y);
        }
        if (cfg.keep_snapshots) {
            out.image_snapshots.push_back(g);
            out.label_snapshots.push_back(y);
        }
        out.diagnostics.push_back(d);

        if (d.variation < cfg.global_tol) {
            out.converged = true;
            break;
        }
    }

    out.image = std::move(g);
    out.labels = have_labels ? std::move(y) : LabelMap(m.rows(), m.cols());
    out.features = theta;
    return out;
}

} // namespace

} // namespace semsar
