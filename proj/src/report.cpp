#include "semsar/report.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

namespace semsar {

namespace {

void check_object(const Json& j, const char* what, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw InvalidInput(std::string(what) + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw InvalidInput(std::string(what) + ": unknown key '" + key + "'");
    }
}

template <class T>
void read(const Json& j, const char* key, T& field, const char* what) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        field = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput(std::string(what) + ": key '" + key + "' has the wrong type");
    }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nan("");
    return it->get<double>();
}

Json gamma_json(const GammaFeature& f) { return Json{{"shape", f.shape}, {"scale", f.scale}}; }

GammaFeature gamma_from_json(const Json& j, GammaFeature base, const char* what) {
    check_object(j, what, {"shape", "scale"});
    read(j, "shape", base.shape, what);
    read(j, "scale", base.scale, what);
    return base;
}

Json rect_json(const Rect& r) { return Json::array({r.r0, r.r1, r.c0, r.c1}); }

Rect rect_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 4) throw InvalidInput(std::string(what) + ": expected [r0, r1, c0, c1]");
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>(), j[3].get<std::size_t>()};
}

template <std::size_t N>
Json per_class(const std::array<double, N>& v) {
    Json out = Json::object();
    for (Label l : kAllLabels) out[std::string(to_string(l))] = number_or_null(v[index(l)]);
    return out;
}

} // namespace

Json to_json(const MaskSpec& m) {
    return Json{{"kind", std::string(to_string(m.kind))}, {"eta", m.eta}, {"eta_c", m.eta_c}, {"eta_r", m.eta_r}};
}

MaskSpec mask_spec_from_json(const Json& j) {
    constexpr const char* what = "mask";
    check_object(j, what, {"kind", "eta", "eta_c", "eta_r"});
    MaskSpec m;
    std::string kind = "mask1";
    read(j, "kind", kind, what);
    m.kind = parse_mask_kind(kind);
    read(j, "eta", m.eta, what);
    read(j, "eta_c", m.eta_c, what);
    read(j, "eta_r", m.eta_r, what);
    return m;
}

Json to_json(const SceneSpec& s) {
    return Json{{"rows", s.rows},
                {"cols", s.cols},
                {"target", rect_json(s.target)},
                {"shadow", rect_json(s.shadow)},
                {"shadow_gamma", gamma_json(s.shadow_gamma)},
                {"background_gamma", gamma_json(s.background_gamma)},
                {"target_gamma", gamma_json(s.target_gamma)},
                {"seed", s.seed}};
}

SceneSpec scene_spec_from_json(const Json& j, SceneSpec s) {
    constexpr const char* what = "scene";
    check_object(j, what,
                 {"rows", "cols", "target", "shadow", "shadow_gamma", "background_gamma", "target_gamma", "seed"});
    read(j, "rows", s.rows, what);
    read(j, "cols", s.cols, what);
    if (j.contains("target")) s.target = rect_from_json(j["target"], "scene.target");
    if (j.contains("shadow")) s.shadow = rect_from_json(j["shadow"], "scene.shadow");
    if (j.contains("shadow_gamma")) s.shadow_gamma = gamma_from_json(j["shadow_gamma"], s.shadow_gamma, what);
    if (j.contains("background_gamma")) {
        s.background_gamma = gamma_from_json(j["background_gamma"], s.background_gamma, what);
    }
    if (j.contains("target_gamma")) s.target_gamma = gamma_from_json(j["target_gamma"], s.target_gamma, what);
    read(j, "seed", s.seed, what);
    s.validate();
    return s;
}

Json to_json(const SolverConfig& c) {
    return Json{{"eps", c.eps ? Json(*c.eps) : Json(nullptr)},
                {"eps_relative", c.eps_relative},
                {"fista_tol", c.fista_tol},
                {"fista_max_iter", c.fista_max_iter},
                {"mm_tol", c.mm_tol},
                {"mm_max_iter", c.mm_max_iter}};
}

SolverConfig solver_config_from_json(const Json& j, SolverConfig c) {
    constexpr const char* what = "solver";
    check_object(j, what, {"eps", "eps_relative", "fista_tol", "fista_max_iter", "mm_tol", "mm_max_iter"});
    if (auto it = j.find("eps"); it != j.end()) {
        if (it->is_null()) {
            c.eps.reset();
        } else {
            double e = 0.0;
            read(j, "eps", e, what);
            c.eps = e;
        }
    }
    read(j, "eps_relative", c.eps_relative, what);
    read(j, "fista_tol", c.fista_tol, what);
    read(j, "fista_max_iter", c.fista_max_iter, what);
    read(j, "mm_tol", c.mm_tol, what);
    read(j, "mm_max_iter", c.mm_max_iter, what);
    return c;
}

Json to_json(const RegConfig& c) {
    return Json{{"eps_relative", c.eps_relative}, {"iterations", c.iterations}};
}

RegConfig reg_config_from_json(const Json& j, RegConfig c) {
    constexpr const char* what = "reg";
    check_object(j, what, {"eps_relative", "iterations"});
    read(j, "eps_relative", c.eps_relative, what);
    read(j, "iterations", c.iterations, what);
    return c;
}

Json to_json(const PipelineConfig& c) {
    return Json{{"lambda", c.lambda},
                {"lambda0", c.lambda0},
                {"normalise", c.normalise},
                {"beta", c.beta},
                {"max_iter", c.max_iter},
                {"k_switch", c.k_switch},
                {"shadow_floor", c.shadow_floor},
                {"global_tol", c.global_tol},
                {"size_prior", Json{{"min_area", c.size_prior.min_area}, {"max_area", c.size_prior.max_area}}},
                {"solver", to_json(c.solver)},
                {"mrf",
                 Json{{"max_sweeps", c.mrf.max_sweeps},
                      {"stop_changed_fraction", c.mrf.stop_changed_fraction},
                      {"eps_relative", c.mrf.eps_relative}}},
                {"fcm", Json{{"fuzzifier", c.fcm.fuzzifier}, {"tol", c.fcm.tol}, {"max_iter", c.fcm.max_iter}}},
                {"features", Json{{"tol", c.features.tol}, {"max_passes", c.features.max_passes}}},
                {"seed", c.seed},
                {"keep_snapshots", c.keep_snapshots}};
}

PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig c) {
    constexpr const char* what = "tar";
    check_object(j, what,
                 {"lambda", "lambda0", "normalise", "beta", "max_iter", "k_switch", "shadow_floor", "global_tol",
                  "size_prior", "solver", "mrf", "fcm", "features", "seed", "keep_snapshots"});
    read(j, "lambda", c.lambda, what);
    read(j, "lambda0", c.lambda0, what);
    read(j, "normalise", c.normalise, what);
    read(j, "beta", c.beta, what);
    read(j, "max_iter", c.max_iter, what);
    read(j, "k_switch", c.k_switch, what);
    read(j, "shadow_floor", c.shadow_floor, what);
    read(j, "global_tol", c.global_tol, what);
    if (auto it = j.find("size_prior"); it != j.end()) {
        check_object(*it, "tar.size_prior", {"min_area", "max_area"});
        read(*it, "min_area", c.size_prior.min_area, what);
        read(*it, "max_area", c.size_prior.max_area, what);
    }
    if (auto it = j.find("solver"); it != j.end()) c.solver = solver_config_from_json(*it, c.solver);
    if (auto it = j.find("mrf"); it != j.end()) {
        check_object(*it, "tar.mrf", {"max_sweeps", "stop_changed_fraction", "eps_relative"});
        read(*it, "max_sweeps", c.mrf.max_sweeps, what);
        read(*it, "stop_changed_fraction", c.mrf.stop_changed_fraction, what);
        read(*it, "eps_relative", c.mrf.eps_relative, what);
    }
    if (auto it = j.find("fcm"); it != j.end()) {
        check_object(*it, "tar.fcm", {"fuzzifier", "tol", "max_iter"});
        read(*it, "fuzzifier", c.fcm.fuzzifier, what);
        read(*it, "tol", c.fcm.tol, what);
        read(*it, "max_iter", c.fcm.max_iter, what);
    }
    if (auto it = j.find("features"); it != j.end()) {
        check_object(*it, "tar.features", {"tol", "max_passes"});
        read(*it, "tol", c.features.tol, what);
        read(*it, "max_passes", c.features.max_passes, what);
    }
    read(j, "seed", c.seed, what);
    read(j, "keep_snapshots", c.keep_snapshots, what);
    return c;
}

Json to_json(const ReconstructConfig& c) {
    Json tar = to_json(c.tar);
    // Shared values live at the top level; the per-run seed is in the manifest.
    tar.erase("lambda");
    tar.erase("normalise");
    tar.erase("seed");
    return Json{{"lambda", c.lambda},
                {"normalise", c.normalise},
                {"solver", to_json(c.solver)},
                {"reg", to_json(c.reg)},
                {"tar", tar}};
}

ReconstructConfig reconstruct_config_from_json(const Json& j, ReconstructConfig c) {
    constexpr const char* what = "reconstruct";
    check_object(j, what, {"lambda", "normalise", "solver", "reg", "tar"});
    read(j, "lambda", c.lambda, what);
    read(j, "normalise", c.normalise, what);
    if (auto it = j.find("solver"); it != j.end()) c.solver = solver_config_from_json(*it, c.solver);
    if (auto it = j.find("reg"); it != j.end()) c.reg = reg_config_from_json(*it, c.reg);
    if (auto it = j.find("tar"); it != j.end()) {
        if (it->contains("lambda") || it->contains("normalise") || it->contains("seed")) {
            throw InvalidInput("reconstruct.tar: lambda, normalise and seed are set at the top level");
        }
        c.tar = pipeline_config_from_json(*it, c.tar);
    }
    return c;
}

Json to_json(const SemanticFeatures& f) {
    Json out = Json::object();
    for (Label l : kAllLabels)
        if (f.has(l)) out[std::string(to_string(l))] = gamma_json(f[l]);
    out["constrained"] = f.constrained();
    return out;
}

Json to_json(const SolveReport& r) {
    Json out{{"iterations", r.iterations},
             {"converged", r.converged},
             {"residual", r.residual},
             {"objective", r.objective}};
    if (!r.inner_iterations.empty()) {
        out["eps"] = r.eps;
        out["inner_iterations"] = r.inner_iterations;
        out["nonconvex_objective"] = r.nonconvex_objective;
        out["variation"] = r.variation;
    }
    return out;
}

Json to_json(const IterationDiagnostics& d) {
    Json counts = Json::object();
    for (Label l : kAllLabels) counts[std::string(to_string(l))] = d.class_counts[index(l)];
    Json out{{"k", d.k},
             {"lambda", d.lambda},
             {"clusters", d.clusters},
             {"icm_sweeps", d.icm_sweeps},
             {"icm_changed", d.icm_changed},
             {"changed_labels", d.changed_labels},
             {"objective", number_or_null(d.objective)},
             {"variation", number_or_null(d.variation)},
             {"solver_iterations", d.solver_iterations},
             {"eps", d.eps},
             {"feature_fallback", d.feature_fallback},
             {"refinement_skipped", d.refinement_skipped},
             {"class_counts", counts},
             {"features", to_json(d.features)},
             {"weight_min", per_class(d.weight_min)},
             {"weight_max", per_class(d.weight_max)},
             {"near_zero_clutter", d.near_zero_clutter}};
    if (d.ptcr_db) out["ptcr_db"] = number_or_null(*d.ptcr_db);
    if (d.recall) out["recall"] = *d.recall;
    if (d.precision) out["precision"] = *d.precision;
    return out;
}

Json to_json(const RunResult& r) {
    Json iters = Json::array();
    for (const auto& d : r.diagnostics) iters.push_back(to_json(d));
    return Json{{"converged", r.converged},
                {"iterations", r.diagnostics.size()},
                {"clutter_level", r.clutter_level},
                {"features", to_json(r.features)},
                {"diagnostics", iters}};
}

Json to_json(const MetricReport& m) {
    return Json{{"ptcr_db", number_or_null(m.ptcr_db)},
                {"ptcr_infinite", m.ptcr_infinite()},
                {"chi_t", number_or_null(m.chi_t)},
                {"recall", number_or_null(m.recall)},
                {"precision", number_or_null(m.precision)},
                {"ptcr_n", "non-target pixel count"}};
}

MetricReport metric_report_from_json(const Json& j) {
    MetricReport m;
    m.ptcr_db = j.value("ptcr_infinite", false) ? std::numeric_limits<double>::infinity() : number_from(j, "ptcr_db");
    m.chi_t = number_from(j, "chi_t");
    m.recall = number_from(j, "recall");
    m.precision = number_from(j, "precision");
    return m;
}

} // namespace semsar
