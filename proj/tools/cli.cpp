#include "cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "semsar/datagen.hpp"
#include "semsar/eval.hpp"
#include "semsar/io.hpp"
#include "semsar/random.hpp"
#include "semsar/report.hpp"

#ifndef SEMSAR_VERSION
#define SEMSAR_VERSION "0.0.0"
#endif

namespace semsar::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string file_digest(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw InvalidInput("cannot open '" + p.string() + "'");
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    char buf[24];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

Json read_json(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw InvalidInput("cannot open '" + p.string() + "'");
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("'" + p.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text(const fs::path& p, const std::string& text) {
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw InvalidInput("cannot open '" + tmp.string() + "' for writing");
        f << text;
        if (!f) throw InvalidInput("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, p);
}

void write_json(const fs::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

fs::path output_root(const std::string& flag, const char* command) {
    if (!flag.empty()) return flag;
    const char* env = std::getenv("SEMSAR_OUT");
    return fs::path(env && *env ? env : ".") / command;
}

Json manifest_base(const char* command, std::uint64_t seed, const std::string& started) {
    return Json{{"tool", "semsar"},
                {"version", SEMSAR_VERSION},
                {"command", command},
                {"seed", seed},
                {"started", started}};
}

// ---------------------------------------------------------------------------
// Shared flags
// ---------------------------------------------------------------------------

struct MaskFlags {
    std::string kind = "mask1";
    double eta = 0.5, eta_c = 0.5, eta_r = 0.5;
    CLI::Option* o_eta = nullptr;
    CLI::Option* o_eta_c = nullptr;
    CLI::Option* o_eta_r = nullptr;

    void add(CLI::App* app) {
        app->add_option("--mask", kind, "Sampling pattern")->check(CLI::IsMember({"mask1", "mask2", "mask3"}));
        o_eta = app->add_option("--eta", eta, "Mask-1 rate of kept cells");
        o_eta_c = app->add_option("--eta-c", eta_c, "Mask-2/3 rate of kept columns");
        o_eta_r = app->add_option("--eta-r", eta_r, "Mask-3 rate of kept rows per column");
    }

    MaskSpec resolve() const {
        const bool e = o_eta->count() > 0, c = o_eta_c->count() > 0, r = o_eta_r->count() > 0;
        if (e && (c || r)) throw UsageError("give either --eta or --eta-c/--eta-r, not both");
        MaskSpec m;
        m.kind = parse_mask_kind(kind);
        switch (m.kind) {
        case MaskKind::Mask1:
            if (c || r) throw UsageError("mask1 is controlled by --eta");
            m.eta = eta;
            break;
        case MaskKind::Mask2:
            if (e || r) throw UsageError("mask2 is controlled by --eta-c");
            m.eta_c = eta_c;
            m.eta = eta_c;
            break;
        case MaskKind::Mask3:
            if (e) throw UsageError("mask3 is controlled by --eta-c and --eta-r");
            m.eta_c = eta_c;
            m.eta_r = eta_r;
            m.eta = eta_c * eta_r;
            break;
        }
        return m;
    }
};

struct PgmFlags {
    bool enabled = false;
    double range_db = 40.0;

    void add(CLI::App* app) {
        app->add_flag("--pgm", enabled, "Also write PGM previews");
        app->add_option("--db-range", range_db, "Dynamic range of dB previews");
    }
    io::PgmOptions options() const {
        io::PgmOptions o;
        o.dynamic_range_db = range_db;
        return o;
    }
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    MaskFlags mask;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    PgmFlags pgm;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const std::string started = utc_now();
    SceneSpec spec;
    spec.seed = a.seed;
    Json scene_json = Json::object();
    if (!a.config.empty()) {
        scene_json = read_json(a.config);
        spec = scene_spec_from_json(scene_json, spec);
    }
    spec.validate();
    const MaskSpec ms = a.mask.resolve();
    if (!(a.noise >= 0.0)) throw UsageError("--noise must be non-negative");

    const Scene scene = synth_scene(spec);
    const std::uint64_t mask_seed = derive_seed(a.seed, "mask");
    const std::uint64_t noise_seed = derive_seed(a.seed, "noise");
    const MaskPtr mask = make_mask(ms, spec.rows, spec.cols, mask_seed);
    const NoiseSpec noise = NoiseSpec::relative_to(measurement_forward(scene.image, mask), a.noise);
    const MeasurementVector m = simulate_acquisition(scene.image, mask, noise, noise_seed);

    const fs::path dir = output_root(a.out, "simulate");
    fs::create_directories(dir);
    io::write_image(dir / "scene.cimg", scene.image);
    io::write_labels(dir / "truth.lmap", scene.truth);
    io::write_mask(dir / "mask.mask", *mask);
    io::write_measurement(dir / "measurement.cvec", m);
    Json outputs{{"scene", "scene.cimg"}, {"truth", "truth.lmap"}, {"mask", "mask.mask"},
                 {"measurement", "measurement.cvec"}};
    if (a.pgm.enabled) {
        io::write_pgm(dir / "scene.pgm", scene.image, a.pgm.options());
        io::write_label_pgm(dir / "truth.pgm", scene.truth);
        outputs["scene_pgm"] = "scene.pgm";
        outputs["truth_pgm"] = "truth.pgm";
    }

    Json man = manifest_base("simulate", a.seed, started);
    man["config"] = Json{{"scene", to_json(spec)}, {"mask", to_json(ms)}, {"noise_relative", a.noise}};
    man["seeds"] = Json{{"scene", spec.seed}, {"mask", mask_seed}, {"noise", noise_seed}};
    man["noise_sigma"] = noise.sigma;
    man["inputs"] = a.config.empty() ? Json::object() : Json{{"config", fs::absolute(a.config).string()}};
    man["outputs"] = outputs;
    man["finished"] = utc_now();
    write_json(dir / "manifest.json", man);
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

struct ReconstructArgs {
    std::string measurement;
    std::string algo;
    std::string config;
    std::string truth;
    std::optional<double> lambda, lambda0, beta;
    std::optional<int> max_iter, k_switch;
    bool no_normalise = false;
    bool snapshots = false;
    std::uint64_t seed = 0;
    std::string out;
    PgmFlags pgm;
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
    const std::string started = utc_now();
    const Algorithm algo = parse_algorithm(a.algo);
    ReconstructConfig rc;
    if (!a.config.empty()) rc = reconstruct_config_from_json(read_json(a.config), rc);
    if (a.lambda) rc.lambda = *a.lambda;
    if (a.lambda0) rc.tar.lambda0 = *a.lambda0;
    if (a.beta) rc.tar.beta = *a.beta;
    if (a.max_iter) rc.tar.max_iter = *a.max_iter;
    if (a.k_switch) rc.tar.k_switch = *a.k_switch;
    if (a.no_normalise) rc.normalise = false;
    if (a.snapshots) rc.tar.keep_snapshots = true;

    const MeasurementVector m = io::read_measurement(a.measurement);
    std::optional<LabelMap> truth;
    if (!a.truth.empty()) truth = io::read_labels(a.truth);
    const Reconstruction rec = reconstruct(algo, m, rc, a.seed, truth ? &*truth : nullptr);

    const fs::path dir = output_root(a.out, "reconstruct");
    fs::create_directories(dir);
    io::write_image(dir / "image.cimg", rec.image);
    Json outputs{{"image", "image.cimg"}, {"diagnostics", "diagnostics.json"}};
    Json diag{{"algorithm", std::string(to_string(algo))}, {"mask", to_json(m.mask().spec())}};
    if (rec.report) diag["report"] = to_json(*rec.report);
    if (rec.run) {
        io::write_labels(dir / "labels.lmap", rec.run->labels);
        outputs["labels"] = "labels.lmap";
        diag["run"] = to_json(*rec.run);
        if (!rec.run->image_snapshots.empty()) {
            fs::create_directories(dir / "snapshots");
            for (std::size_t k = 0; k < rec.run->image_snapshots.size(); ++k) {
                char name[32];
                std::snprintf(name, sizeof name, "iter%02zu", k + 1);
                io::write_image(dir / "snapshots" / (std::string(name) + ".cimg"), rec.run->image_snapshots[k]);
                io::write_labels(dir / "snapshots" / (std::string(name) + ".lmap"), rec.run->label_snapshots[k]);
            }
            outputs["snapshots"] = "snapshots";
        }
    }
    if (truth) {
        diag["metrics"] = to_json(evaluate(rec.image, *truth, rec.run ? &rec.run->labels : nullptr));
    }
    write_json(dir / "diagnostics.json", diag);
    if (a.pgm.enabled) {
        io::write_pgm(dir / "image.pgm", rec.image, a.pgm.options());
        outputs["image_pgm"] = "image.pgm";
        if (rec.run) {
            io::write_label_pgm(dir / "labels.pgm", rec.run->labels);
            outputs["labels_pgm"] = "labels.pgm";
        }
    }

    Json man = manifest_base("reconstruct", a.seed, started);
    man["algorithm"] = std::string(to_string(algo));
    man["mask"] = to_json(m.mask().spec());
    Json cfg = to_json(rc);
    cfg["tar"]["keep_snapshots"] = rc.tar.keep_snapshots;
    man["config"] = cfg;
    Json inputs{{"measurement", fs::absolute(a.measurement).string()}, {"measurement_digest", file_digest(a.measurement)}};
    if (!a.truth.empty()) inputs["truth"] = fs::absolute(a.truth).string();
    if (!a.config.empty()) inputs["config"] = fs::absolute(a.config).string();
    man["inputs"] = inputs;
    man["outputs"] = outputs;
    man["finished"] = utc_now();
    write_json(dir / "manifest.json", man);
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string recon;
    std::string truth;
    std::string labels;
    std::string format = "text";
    std::string name;
    std::string algo;
    std::uint64_t seed = 0;
};

std::string fmt_metric(double v) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return "inf";
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    if (!fs::exists(a.truth)) throw UsageError("truth file '" + a.truth + "' does not exist");
    const ComplexImage g = io::read_image(a.recon);
    const LabelMap truth = io::read_labels(a.truth);

    // A reconstruction written by this tool carries its algorithm, mask and
    // label map in the sibling manifest.
    std::string algorithm = a.algo;
    std::optional<MaskSpec> mask;
    std::string labels = a.labels;
    const fs::path manifest = fs::path(a.recon).parent_path() / "manifest.json";
    if (fs::exists(manifest)) {
        const Json man = read_json(manifest);
        if (algorithm.empty() && man.contains("algorithm")) algorithm = man["algorithm"].get<std::string>();
        if (man.contains("mask")) mask = mask_spec_from_json(man["mask"]);
        if (labels.empty() && man.contains("outputs") && man["outputs"].contains("labels")) {
            labels = (fs::path(a.recon).parent_path() / man["outputs"]["labels"].get<std::string>()).string();
        }
    }
    std::optional<LabelMap> predicted;
    if (!labels.empty()) predicted = io::read_labels(labels);
    const MetricReport r = evaluate(g, truth, predicted ? &*predicted : nullptr);

    const std::string scene = a.name.empty() ? fs::path(a.recon).stem().string() : a.name;
    if (a.format == "csv") {
        out << csv_header() << '\n' << csv_row(scene, algorithm, mask, r) << '\n';
    } else {
        out << "ptcr_db    " << fmt_metric(r.ptcr_db) << "  (N = non-target pixel count)\n";
        out << "chi_t      " << fmt_metric(r.chi_t) << '\n';
        out << "recall     " << fmt_metric(r.recall) << '\n';
        out << "precision  " << fmt_metric(r.precision) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
};

struct SweepPlan {
    CompareSpec spec;
    std::vector<NamedScene> scenes;
    std::vector<SceneSpec> scene_specs;
};

// {"seed", "scenes": {"count", "base"} | [{"name", "spec"}], "masks": [...],
//  "algorithms": [...], "noise_relative", "reconstruct": {...}}
SweepPlan sweep_plan(const Json& j, std::optional<std::uint64_t> seed_flag) {
    if (!j.is_object()) throw InvalidInput("sweep: expected a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key != "seed" && key != "scenes" && key != "masks" && key != "algorithms" && key != "noise_relative" &&
            key != "reconstruct") {
            throw InvalidInput("sweep: unknown key '" + key + "'");
        }
    }
    SweepPlan p;
    p.spec.seed = seed_flag ? *seed_flag : j.value("seed", std::uint64_t{0});
    p.spec.noise_relative = j.value("noise_relative", 0.0);
    if (!(p.spec.noise_relative >= 0.0)) throw InvalidInput("sweep: noise_relative must be non-negative");
    if (!j.contains("masks") || !j["masks"].is_array()) throw InvalidInput("sweep: 'masks' must be an array");
    for (const auto& m : j["masks"]) p.spec.masks.push_back(mask_spec_from_json(m));
    if (!j.contains("algorithms") || !j["algorithms"].is_array()) {
        throw InvalidInput("sweep: 'algorithms' must be an array");
    }
    for (const auto& a : j["algorithms"]) p.spec.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    if (j.contains("reconstruct")) p.spec.recon = reconstruct_config_from_json(j["reconstruct"]);

    const Json sc = j.value("scenes", Json{{"count", 1}});
    if (sc.is_object()) {
        for (const auto& [key, v] : sc.items())
            if (key != "count" && key != "base") throw InvalidInput("sweep.scenes: unknown key '" + key + "'");
        const auto count = sc.value("count", std::size_t{1});
        SceneSpec base;
        if (sc.contains("base")) {
            if (sc["base"].contains("seed")) throw InvalidInput("sweep.scenes.base: scene seeds derive from 'seed'");
            base = scene_spec_from_json(sc["base"]);
        }
        for (std::size_t i = 0; i < count; ++i) {
            SceneSpec s = base;
            s.seed = derive_seed(p.spec.seed, "scene", i);
            char name[32];
            std::snprintf(name, sizeof name, "scene%02zu", i);
            p.scene_specs.push_back(s);
            p.scenes.push_back({name, synth_scene(s)});
        }
    } else if (sc.is_array()) {
        for (const auto& e : sc) {
            if (!e.is_object() || !e.contains("name")) throw InvalidInput("sweep.scenes: entries need a 'name'");
            SceneSpec s = e.contains("spec") ? scene_spec_from_json(e["spec"]) : SceneSpec{};
            p.scene_specs.push_back(s);
            p.scenes.push_back({e["name"].get<std::string>(), synth_scene(s)});
        }
    } else {
        throw InvalidInput("sweep: 'scenes' must be an object or an array");
    }
    return p;
}

std::string run_dir_name(const std::string& scene, const MaskSpec& m, Algorithm a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s__%s-%g-%g-%g__%s", scene.c_str(), std::string(to_string(m.kind)).c_str(), m.eta,
                  m.eta_c, m.eta_r, std::string(to_string(a)).c_str());
    return buf;
}

// Everything that determines a run's outputs.
Json run_key(const SweepPlan& p, std::size_t cell, Algorithm a) {
    const std::size_t nm = p.spec.masks.size();
    return Json{{"scene", to_json(p.scene_specs[cell / nm])},
                {"mask", to_json(p.spec.masks[cell % nm])},
                {"algorithm", std::string(to_string(a))},
                {"cell", cell},
                {"sweep_seed", p.spec.seed},
                {"run_seed", cell_run_seed(p.spec, cell)},
                {"noise_relative", p.spec.noise_relative},
                {"reconstruct", to_json(p.spec.recon)},
                {"version", SEMSAR_VERSION}};
}

// A finished run has a manifest whose key matches and whose outputs exist.
std::optional<std::pair<MaskSpec, MetricReport>> finished_run(const fs::path& dir, const Json& key) {
    const fs::path man = dir / "manifest.json";
    if (!fs::exists(man)) return std::nullopt;
    try {
        const Json j = read_json(man);
        if (j.value("key", Json()) != key) return std::nullopt;
        for (const auto& [name, file] : j.at("outputs").items())
            if (!fs::exists(dir / file.get<std::string>())) return std::nullopt;
        return std::make_pair(mask_spec_from_json(j.at("mask_spec")), metric_report_from_json(j.at("metrics")));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    const std::string started = utc_now();
    const Json cfg = read_json(a.config);
    const SweepPlan plan = sweep_plan(cfg, a.seed);
    const std::size_t nm = plan.spec.masks.size();
    const std::size_t na = plan.spec.algorithms.size();
    const std::size_t cells = plan.scenes.size() * nm;

    const fs::path root = output_root(a.out, "sweep");
    fs::create_directories(root / "runs");
    std::vector<CompareRow> rows(cells * na);
    std::vector<std::string> errors(cells);
    std::vector<int> reused(cells * na, 0);
    const int jobs = a.jobs > 0 ? a.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cells); ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const auto& scene = plan.scenes[ci / nm];
        const MaskSpec& ms = plan.spec.masks[ci % nm];
        try {
            std::optional<MeasurementVector> m;
            for (std::size_t ai = 0; ai < na; ++ai) {
                const Algorithm algo = plan.spec.algorithms[ai];
                CompareRow& row = rows[ci * na + ai];
                row.scene = scene.name;
                row.algorithm = algo;
                const fs::path dir = root / "runs" / run_dir_name(scene.name, ms, algo);
                const Json key = run_key(plan, ci, algo);
                if (auto done = finished_run(dir, key)) {
                    row.mask = done->first;
                    row.metrics = done->second;
                    reused[ci * na + ai] = 1;
                    continue;
                }
                const std::string run_started = utc_now();
                if (!m) m = cell_measurement(scene.scene, ms, plan.spec, ci);
                const Reconstruction rec = reconstruct(algo, *m, plan.spec.recon, cell_run_seed(plan.spec, ci));
                row.mask = m->mask().spec();
                row.metrics = evaluate(rec.image, scene.scene.truth, rec.run ? &rec.run->labels : nullptr);

                fs::create_directories(dir);
                io::write_image(dir / "image.cimg", rec.image);
                Json outputs{{"image", "image.cimg"}, {"metrics", "metrics.json"}};
                if (rec.run) {
                    io::write_labels(dir / "labels.lmap", rec.run->labels);
                    write_json(dir / "diagnostics.json", to_json(*rec.run));
                    outputs["labels"] = "labels.lmap";
                    outputs["diagnostics"] = "diagnostics.json";
                } else if (rec.report) {
                    write_json(dir / "diagnostics.json", to_json(*rec.report));
                    outputs["diagnostics"] = "diagnostics.json";
                }
                write_json(dir / "metrics.json", to_json(row.metrics));
                Json man = manifest_base("sweep-run", plan.spec.seed, run_started);
                man["key"] = key;
                man["seeds"] = Json{{"mask", derive_seed(plan.spec.seed, "mask", ci)},
                                    {"noise", derive_seed(plan.spec.seed, "noise", ci)},
                                    {"run", cell_run_seed(plan.spec, ci)}};
                man["mask_spec"] = to_json(row.mask);
                man["metrics"] = to_json(row.metrics);
                man["outputs"] = outputs;
                man["finished"] = utc_now();
                write_json(dir / "manifest.json", man);
            }
        } catch (const std::exception& e) {
            errors[ci] = scene.name + ": " + e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw SolverFailure("sweep: " + e, {});

    write_text(root / "sweep.csv", to_csv(rows));
    std::size_t n_reused = 0;
    for (int r : reused) n_reused += static_cast<std::size_t>(r);
    Json man = manifest_base("sweep", plan.spec.seed, started);
    man["config"] = cfg;
    man["inputs"] = Json{{"config", fs::absolute(a.config).string()}};
    man["runs"] = rows.size();
    man["reused"] = n_reused;
    man["outputs"] = Json{{"table", "sweep.csv"}, {"runs", "runs"}};
    man["finished"] = utc_now();
    write_json(root / "manifest.json", man);
    out << "wrote " << (root / "sweep.csv").string() << " (" << rows.size() << " runs, " << n_reused
        << " reused)\n";
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semantic-guided sparse SAR image formation"};
    app.set_version_flag("--version", SEMSAR_VERSION);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Generate a synthetic scene and its undersampled phase history");
    s->add_option("--config", sim.config, "Scene specification (JSON)");
    sim.mask.add(s);
    s->add_option("--noise", sim.noise, "Noise sigma relative to the RMS of the clean measurement");
    s->add_option("--seed", sim.seed, "Master seed");
    s->add_option("--out", sim.out, "Output directory (default $SEMSAR_OUT/simulate)");
    sim.pgm.add(s);

    ReconstructArgs rec;
    auto* r = app.add_subcommand("reconstruct", "Form an image from a measurement file");
    r->add_option("measurement", rec.measurement, "CVEC measurement file")->required();
    r->add_option("--algo", rec.algo, "pf | poi | reg | irwl1 | tar")->required();
    r->add_option("--config", rec.config, "Reconstruction parameters (JSON)");
    r->add_option("--truth", rec.truth, "Truth label map for per-iteration diagnostics");
    r->add_option("--lambda", rec.lambda, "Regularisation weight");
    r->add_option("--lambda0", rec.lambda0, "Schedule rate constant (tar)");
    r->add_option("--beta", rec.beta, "MRF weight (tar)");
    r->add_option("--max-iter", rec.max_iter, "Outer iterations (tar)");
    r->add_option("--k-switch", rec.k_switch, "Iteration switching to two clusters (tar)");
    r->add_flag("--no-normalise", rec.no_normalise, "Use lambda in absolute units");
    r->add_flag("--snapshots", rec.snapshots, "Keep per-iteration images and labels (tar)");
    r->add_option("--seed", rec.seed, "Master seed");
    r->add_option("--out", rec.out, "Output directory (default $SEMSAR_OUT/reconstruct)");
    rec.pgm.add(r);

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Score a reconstruction against truth labels");
    e->add_option("recon", ev.recon, "CIMG reconstruction")->required();
    e->add_option("--truth", ev.truth, "Truth label map")->required();
    e->add_option("--labels", ev.labels, "Predicted label map (recall and precision)");
    e->add_option("--format", ev.format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
    e->add_option("--name", ev.name, "Scene name for the CSV row");
    e->add_option("--algo", ev.algo, "Algorithm name for the CSV row");
    e->add_option("--seed", ev.seed, "Unused; accepted for a uniform interface");

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "Run a scene x mask x algorithm grid");
    w->add_option("config", sw.config, "Sweep matrix (JSON)")->required();
    w->add_option("--out", sw.out, "Output directory (default $SEMSAR_OUT/sweep)");
    w->add_option("--seed", sw.seed, "Override the sweep seed");
    w->add_option("--jobs", sw.jobs, "Concurrent runs (default: OpenMP thread count)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*s) return cmd_simulate(sim, out);
        if (*r) return cmd_reconstruct(rec, out);
        if (*e) return cmd_evaluate(ev, out);
        if (*w) return cmd_sweep(sw, out);
    } catch (const InvalidInput& x) {
        err << "error: " << x.what() << '\n';
        return kExitUsage;
    } catch (const DegenerateInput& x) {
        err << "numerical failure: " << x.what() << '\n';
        return kExitNumerical;
    } catch (const SolverFailure& x) {
        err << "numerical failure: " << x.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& x) {
        err << "error: " << x.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}

} // namespace semsar::cli
