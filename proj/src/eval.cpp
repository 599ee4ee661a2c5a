#include "semsar/eval.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "semsar/kernels.hpp"
#include "semsar/random.hpp"

namespace semsar {

ComplexImage pf_imaging(const MeasurementVector& m) { return measurement_adjoint(m); }

SolveResult poi_imaging(const MeasurementVector& m, double lambda, const SolverConfig& base) {
    SolverConfig cfg = base;
    cfg.lambda = lambda;
    return fista_weighted_l1(m, uniform_weights(m.rows(), m.cols()), cfg, pf_imaging(m));
}

void RegConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("reg: lambda must be positive");
    if (!(eps_relative > 0.0)) throw InvalidInput("reg: eps_relative must be positive");
    if (iterations < 0) throw InvalidInput("reg: iterations must be non-negative");
}

double tv_value(const ComplexImage& g, double eps) {
    const std::size_t R = g.rows(), C = g.cols();
    double s = 0.0;
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const cplx x = g(r, c);
            const cplx dh = c + 1 < C ? g(r, c + 1) - x : cplx{};
            const cplx dv = r + 1 < R ? g(r + 1, c) - x : cplx{};
            s += std::sqrt(std::norm(dh) + std::norm(dv) + eps * eps);
        }
    return s;
}

SolveResult reg_imaging(const MeasurementVector& m, const RegConfig& cfg) {
    cfg.validate();
    const PartialFourierModel model(m);
    ComplexImage g = model.back_projection();
    const double peak = max_magnitude(g);
    const double eps = cfg.eps_relative * (peak > 0.0 ? peak : 1.0);
    const double step = 1.0 / (1.0 / cfg.lambda + 8.0 / eps);
    auto objective = [&](const ComplexImage& x) { return model.residual_sq(x) / (2.0 * cfg.lambda) + tv_value(x, eps); };

    SolveResult out;
    auto& rep = out.report;
    rep.eps = eps;
    rep.objective.push_back(objective(g));
    ComplexImage tv(g.rows(), g.cols());
    for (int t = 1; t <= cfg.iterations; ++t) {
        const ComplexImage n = model.normal(g);
        kernels::omp::tv_gradient(g.values(), g.rows(), g.cols(), eps, tv.values());
        const auto& back = model.back_projection();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= step * ((n[i] - back[i]) / cfg.lambda + tv[i]);
        const double f = objective(g);
        rep.iterations = t;
        if (!std::isfinite(f) || f > rep.objective.back() * (1.0 + 1e-9) + 1e-12) {
            rep.objective.push_back(f);
            throw SolverFailure("reg_imaging: objective increased at iteration " + std::to_string(t), rep.objective);
        }
        rep.objective.push_back(f);
    }
    rep.converged = true;
    rep.residual = std::sqrt(model.residual_sq(g));
    out.image = std::move(g);
    return out;
}

SolveResult std_irw_l1(const MeasurementVector& m, double lambda, const SolverConfig& base) {
    SolverConfig cfg = base;
    cfg.lambda = lambda;
    return irw_l1(m, MagnitudeRule{}, cfg, pf_imaging(m));
}

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Pf: return "pf";
    case Algorithm::Poi: return "poi";
    case Algorithm::Reg: return "reg";
    case Algorithm::IrwL1: return "irwl1";
    case Algorithm::Tar: return "tar";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view s) {
    for (Algorithm a : {Algorithm::Pf, Algorithm::Poi, Algorithm::Reg, Algorithm::IrwL1, Algorithm::Tar})
        if (s == to_string(a)) return a;
    throw InvalidInput("unknown algorithm '" + std::string(s) + "' (expected pf|poi|reg|irwl1|tar)");
}

Reconstruction reconstruct(Algorithm a, const MeasurementVector& m, const ReconstructConfig& cfg, std::uint64_t seed,
                           const LabelMap* truth) {
    Reconstruction out;
    if (a == Algorithm::Pf) {
        out.image = pf_imaging(m);
        return out;
    }
    if (a == Algorithm::Tar) {
        PipelineConfig pc = cfg.tar;
        pc.lambda = cfg.lambda;
        pc.normalise = cfg.normalise;
        pc.seed = seed;
        RunResult r = tar_imaging(m, pc, truth);
        out.image = r.image;
        out.run = std::move(r);
        return out;
    }
    const double s = cfg.normalise ? clutter_level(measurement_adjoint(m)) : 1.0;
    const MeasurementVector mn = cfg.normalise ? scaled(m, 1.0 / s) : m;
    SolveResult r;
    if (a == Algorithm::Poi) {
        r = poi_imaging(mn, cfg.lambda, cfg.solver);
    } else if (a == Algorithm::Reg) {
        RegConfig rc = cfg.reg;
        rc.lambda = cfg.lambda;
        r = reg_imaging(mn, rc);
    } else {
        r = std_irw_l1(mn, cfg.lambda, cfg.solver);
    }
    for (auto& v : r.image.values()) v *= s;
    out.image = std::move(r.image);
    out.report = std::move(r.report);
    return out;
}

MeasurementVector cell_measurement(const Scene& scene, const MaskSpec& mask, const CompareSpec& spec,
                                   std::size_t cell) {
    const auto& img = scene.image;
    MaskPtr m = make_mask(mask, img.rows(), img.cols(), derive_seed(spec.seed, "mask", cell));
    const MeasurementVector clean = measurement_forward(img, m);
    const NoiseSpec noise = NoiseSpec::relative_to(clean, spec.noise_relative);
    return simulate_acquisition(img, m, noise, derive_seed(spec.seed, "noise", cell));
}

std::uint64_t cell_run_seed(const CompareSpec& spec, std::size_t cell) { return derive_seed(spec.seed, "tar", cell); }

std::vector<CompareRow> compare_table(const std::vector<NamedScene>& scenes, const CompareSpec& spec) {
    const std::size_t nm = spec.masks.size();
    const std::size_t na = spec.algorithms.size();
    const std::size_t cells = scenes.size() * nm;
    std::vector<CompareRow> rows(cells * na);
    std::vector<std::string> errors(cells);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t cell = 0; cell < static_cast<std::ptrdiff_t>(cells); ++cell) {
        const auto ci = static_cast<std::size_t>(cell);
        const auto& sc = scenes[ci / nm];
        const MaskSpec& ms = spec.masks[ci % nm];
        try {
            const MeasurementVector m = cell_measurement(sc.scene, ms, spec, ci);
            for (std::size_t ai = 0; ai < na; ++ai) {
                const Algorithm a = spec.algorithms[ai];
                Reconstruction rec = reconstruct(a, m, spec.recon, cell_run_seed(spec, ci), nullptr);
                CompareRow& row = rows[ci * na + ai];
                row.scene = sc.name;
                row.algorithm = a;
                row.mask = m.mask().spec();
                row.metrics = evaluate(rec.image, sc.scene.truth, rec.run ? &rec.run->labels : nullptr);
            }
        } catch (const std::exception& e) {
            errors[ci] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw SolverFailure("compare_table: " + e, {});
    return rows;
}

namespace {

auto mask_key(const MaskSpec& m) { return std::make_tuple(static_cast<int>(m.kind), m.eta, m.eta_c, m.eta_r); }

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

std::vector<CompareRow> mean_rows(const std::vector<CompareRow>& rows) {
    struct Acc {
        CompareRow proto;
        double ptcr = 0, chi = 0, rec = 0, prec = 0;
        std::size_t n = 0;
    };
    std::vector<Acc> accs;
    std::map<std::tuple<int, double, double, double, int>, std::size_t> slot;
    for (const auto& r : rows) {
        const auto mk = mask_key(r.mask);
        const auto key = std::tuple_cat(mk, std::make_tuple(static_cast<int>(r.algorithm)));
        auto [it, fresh] = slot.try_emplace(key, accs.size());
        if (fresh) {
            accs.push_back({});
            accs.back().proto = r;
            accs.back().proto.scene = "mean";
        }
        Acc& a = accs[it->second];
        a.ptcr += r.metrics.ptcr_db;
        a.chi += r.metrics.chi_t;
        a.rec += r.metrics.recall;
        a.prec += r.metrics.precision;
        ++a.n;
    }
    std::vector<CompareRow> out;
    for (auto& a : accs) {
        const double n = static_cast<double>(a.n);
        a.proto.metrics = {a.ptcr / n, a.chi / n, a.rec / n, a.prec / n};
        out.push_back(a.proto);
    }
    return out;
}

std::string_view csv_header() { return "scene,algorithm,mask_kind,eta,eta_c,eta_r,ptcr_db,chi_t,recall,precision"; }

std::string csv_row(std::string_view scene, std::string_view algorithm, const std::optional<MaskSpec>& mask,
                    const MetricReport& m) {
    std::string s(scene);
    s += ',';
    s += algorithm;
    s += ',';
    if (mask) s += to_string(mask->kind);
    const double nan = std::nan("");
    for (double v : {mask ? mask->eta : nan, mask ? mask->eta_c : nan, mask ? mask->eta_r : nan, m.ptcr_db, m.chi_t,
                     m.recall, m.precision}) {
        s += ',';
        s += fmt(v);
    }
    return s;
}

std::string csv_row(const CompareRow& r) { return csv_row(r.scene, to_string(r.algorithm), r.mask, r.metrics); }

std::string to_csv(const std::vector<CompareRow>& rows) {
    std::string out(csv_header());
    out += '\n';
    for (const auto& r : rows) out += csv_row(r) + '\n';
    std::set<std::string> names;
    for (const auto& r : rows) names.insert(r.scene);
    if (names.size() > 1)
        for (const auto& r : mean_rows(rows)) out += csv_row(r) + '\n';
    return out;
}

} // namespace semsar
