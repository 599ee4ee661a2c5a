#include "semsar/semantics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "semsar/random.hpp"

namespace semsar {

// ---------------------------------------------------------------------------
// FCM
// ---------------------------------------------------------------------------

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void update_memberships(std::span<const double> x, const std::vector<double>& v, double m, std::vector<double>& u) {
    const std::size_t C = v.size();
    const double expo = 2.0 / (m - 1.0);
    std::vector<double> d(C);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double* ui = &u[i * C];
        std::size_t zero = C;
        for (std::size_t j = 0; j < C; ++j) {
            d[j] = std::abs(x[i] - v[j]);
            if (d[j] == 0.0 && zero == C) zero = j;
        }
        if (zero < C) {
            for (std::size_t j = 0; j < C; ++j) ui[j] = j == zero ? 1.0 : 0.0;
            continue;
        }
        for (std::size_t j = 0; j < C; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < C; ++k) s += std::pow(d[j] / d[k], expo);
            ui[j] = 1.0 / s;
        }
    }
}

double fcm_objective(std::span<const double> x, const std::vector<double>& v, double m, const std::vector<double>& u) {
    const std::size_t C = v.size();
    double J = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < C; ++j) {
            const double d = x[i] - v[j];
            J += std::pow(u[i * C + j], m) * d * d;
        }
    return J;
}

} // namespace

FcmResult fcm_cluster(std::span<const double> x, int clusters, const FcmConfig& cfg) {
    if (clusters != 2 && clusters != 3) throw InvalidInput("fcm_cluster: cluster count must be 2 or 3");
    if (!(cfg.fuzzifier > 1.0)) throw InvalidInput("fcm_cluster: fuzzifier must exceed 1");
    if (x.empty()) throw InvalidInput("fcm_cluster: no samples");
    for (double v : x)
        if (!std::isfinite(v) || v < 0.0) throw InvalidInput("fcm_cluster: magnitudes must be finite and non-negative");

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (!(hi > lo)) throw DegenerateInput("fcm_cluster: all magnitudes are equal");

    const auto C = static_cast<std::size_t>(clusters);
    FcmResult out;
    out.clusters = clusters;
    out.centers = clusters == 3 ? std::vector<double>{quantile_sorted(sorted, 0.1), quantile_sorted(sorted, 0.5),
                                                      quantile_sorted(sorted, 0.9)}
                                : std::vector<double>{quantile_sorted(sorted, 0.1), quantile_sorted(sorted, 0.9)};
    if (std::adjacent_find(out.centers.begin(), out.centers.end(),
                           [](double a, double b) { return !(b > a); }) != out.centers.end()) {
        for (std::size_t j = 0; j < C; ++j)
            out.centers[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(C - 1);
    }

    const double m = cfg.fuzzifier;
    out.memberships.assign(x.size() * C, 0.0);
    std::vector<double> prev;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        prev = out.memberships;
        update_memberships(x, out.centers, m, out.memberships);
        out.objective.push_back(fcm_objective(x, out.centers, m, out.memberships));
        out.iterations = it;
        for (std::size_t j = 0; j < C; ++j) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double w = std::pow(out.memberships[i * C + j], m);
                num += w * x[i];
                den += w;
            }
            if (den > 0.0) out.centers[j] = num / den;
        }
        if (it > 1) {
            double delta = 0.0;
            for (std::size_t k = 0; k < prev.size(); ++k) delta = std::max(delta, std::abs(prev[k] - out.memberships[k]));
            if (delta < cfg.tol) break;
        }
    }

    out.crisp.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double* ui = &out.memberships[i * C];
        out.crisp[i] = static_cast<int>(std::max_element(ui, ui + C) - ui);
    }
    return out;
}

LabelMap assign_semantic_labels(std::span<const int> crisp, std::span<const double> magnitudes, int clusters,
                                std::size_t rows, std::size_t cols) {
    if (crisp.size() != magnitudes.size() || crisp.size() != rows * cols) {
        throw InvalidInput("assign_semantic_labels: sizes do not match the grid");
    }
    if (clusters < 1 || clusters > 3) throw InvalidInput("assign_semantic_labels: cluster count must be 1..3");
    const auto C = static_cast<std::size_t>(clusters);
    std::vector<double> sum(C, 0.0), sum2(C, 0.0);
    std::vector<std::size_t> count(C, 0);
    for (std::size_t i = 0; i < crisp.size(); ++i) {
        const int k = crisp[i];
        if (k < 0 || k >= clusters) throw InvalidInput("assign_semantic_labels: cluster index out of range");
        sum[static_cast<std::size_t>(k)] += magnitudes[i];
        sum2[static_cast<std::size_t>(k)] += magnitudes[i] * magnitudes[i];
        ++count[static_cast<std::size_t>(k)];
    }

    // (mean, variance, -index) ascending; the last entry becomes Target.
    std::vector<std::tuple<double, double, int>> keys;
    for (std::size_t j = 0; j < C; ++j) {
        if (count[j] == 0) continue;
        const double n = static_cast<double>(count[j]);
        const double mean = sum[j] / n;
        const double var = std::max(0.0, sum2[j] / n - mean * mean);
        keys.emplace_back(mean, var, -static_cast<int>(j));
    }
    std::sort(keys.begin(), keys.end());

    std::array<Label, 3> label_of{Label::Background, Label::Background, Label::Background};
    const std::size_t K = keys.size();
    for (std::size_t r = 0; r < K; ++r) {
        const auto j = static_cast<std::size_t>(-std::get<2>(keys[r]));
        if (r + 1 == K) {
            label_of[j] = Label::Target;
        } else if (r == 0 && K == 3) {
            label_of[j] = Label::Shadow;
        } else {
            label_of[j] = Label::Background;
        }
    }

    LabelMap out(rows, cols);
    for (std::size_t i = 0; i < crisp.size(); ++i) out.set(i, label_of[static_cast<std::size_t>(crisp[i])]);
    return out;
}

// ---------------------------------------------------------------------------
// MRF
// ---------------------------------------------------------------------------

namespace {

// Indexed [y_s][y_t] in the order shadow, background, target.
constexpr std::array<std::array<int, 3>, 3> kHorizontal{{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
constexpr std::array<std::array<int, 3>, 3> kSAboveT{{{0, 2, 1}, {1, 0, 2}, {2, 1, 0}}};
constexpr std::array<std::array<int, 3>, 3> kSBelowT{{{0, 1, 2}, {2, 0, 1}, {1, 2, 0}}};

} // namespace

int pairwise_potential(Label s, Label t, Orientation o) noexcept {
    const auto a = index(s), b = index(t);
    switch (o) {
    case Orientation::Horizontal: return kHorizontal[a][b];
    case Orientation::SAboveT: return kSAboveT[a][b];
    case Orientation::SBelowT: return kSBelowT[a][b];
    }
    return 0;
}

bool pairwise_tables_consistent() noexcept {
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            if (kHorizontal[a][b] != kHorizontal[b][a]) return false;
            if (kSAboveT[a][b] != kSBelowT[b][a]) return false;
            if ((a == b) != (kHorizontal[a][b] == 0) || (a == b) != (kSAboveT[a][b] == 0)) return false;
        }
    return true;
}

double unary_energy(double magnitude, const GammaFeature& f, double eps) {
    return -f.shape * std::log((magnitude + eps) / f.scale) + magnitude / f.scale + std::lgamma(f.shape);
}

double site_energy(const ComplexImage& g, const SemanticFeatures& theta, const LabelMap& y, std::size_t i,
                   Label candidate, double beta, double eps) {
    const std::size_t R = y.rows(), C = y.cols();
    const std::size_t r = i / C, c = i % C;
    double e = unary_energy(std::abs(g[i]), theta[candidate], eps);
    int pair = 0;
    if (c > 0) pair += pairwise_potential(candidate, y(r, c - 1), Orientation::Horizontal);
    if (c + 1 < C) pair += pairwise_potential(candidate, y(r, c + 1), Orientation::Horizontal);
    if (r > 0) pair += pairwise_potential(candidate, y(r - 1, c), Orientation::SBelowT);
    if (r + 1 < R) pair += pairwise_potential(candidate, y(r + 1, c), Orientation::SAboveT);
    return e + beta * pair;
}

double label_energy(const ComplexImage& g, const SemanticFeatures& theta, const LabelMap& y, double beta,
                    double eps) {
    if (!y.same_shape(g)) throw InvalidInput("label_energy: image and label shapes differ");
    const std::size_t R = y.rows(), C = y.cols();
    double unary = 0.0;
    long pair = 0;
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const Label l = y(r, c);
            unary += unary_energy(std::abs(g(r, c)), theta[l], eps);
            if (c + 1 < C) pair += pairwise_potential(l, y(r, c + 1), Orientation::Horizontal);
            if (r + 1 < R) pair += pairwise_potential(l, y(r + 1, c), Orientation::SAboveT);
        }
    return unary + beta * static_cast<double>(pair);
}

IcmResult icm_infer(const ComplexImage& g, const SemanticFeatures& theta, const LabelMap& init, const MrfConfig& cfg,
                    double eps) {
    if (!init.same_shape(g)) throw InvalidInput("icm_infer: image and label shapes differ");
    if (!(cfg.beta >= 0.0)) throw InvalidInput("icm_infer: beta must be non-negative");
    if (cfg.max_sweeps < 1) throw InvalidInput("icm_infer: max_sweeps must be >= 1");
    if (!(eps > 0.0)) throw InvalidInput("icm_infer: eps must be positive");

    std::vector<Label> candidates;
    for (Label l : kAllLabels)
        if (theta.has(l)) candidates.push_back(l);
    if (candidates.empty()) throw InvalidInput("icm_infer: no class features");
    for (std::size_t i = 0; i < init.size(); ++i)
        if (!theta.has(init[i])) throw InvalidInput("icm_infer: initial labels use a class without features");

    IcmResult out;
    out.labels = init;
    out.energy.push_back(label_energy(g, theta, out.labels, cfg.beta, eps));
    const std::size_t n = init.size();
    const double stop = cfg.stop_changed_fraction * static_cast<double>(n);
    std::vector<std::size_t> order(n);
    Rng rng(cfg.seed);

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle_in_place(order, rng);
        std::size_t changed = 0;
        for (std::size_t i : order) {
            const Label current = out.labels[i];
            double best = site_energy(g, theta, out.labels, i, current, cfg.beta, eps);
            Label best_label = current;
            for (Label cand : candidates) {
                if (cand == current) continue;
                const double e = site_energy(g, theta, out.labels, i, cand, cfg.beta, eps);
                if (e < best) {
                    best = e;
                    best_label = cand;
                }
            }
            if (best_label != current) {
                out.labels.set(i, best_label);
                ++changed;
            }
        }
        out.changed.push_back(changed);
        out.energy.push_back(label_energy(g, theta, out.labels, cfg.beta, eps));
        out.sweeps = sweep;
        if (static_cast<double>(changed) < stop || changed == 0) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Post-processing
// ---------------------------------------------------------------------------

void SizePrior::validate() const {
    if (min_area == 0 || min_area > max_area) throw InvalidInput("size prior requires 0 < min_area <= max_area");
}

LabelMap refine_by_size(const LabelMap& labels, const SizePrior& prior) {
    prior.validate();
    LabelMap out = labels;
    const std::size_t R = labels.rows(), C = labels.cols();
    std::vector<std::uint8_t> seen(labels.size(), 0);
    std::vector<std::size_t> component, stack;
    for (std::size_t start = 0; start < labels.size(); ++start) {
        if (seen[start] || labels[start] != Label::Target) continue;
        component.clear();
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            component.push_back(i);
            const std::size_t r = i / C, c = i % C;
            auto visit = [&](std::size_t j) {
                if (!seen[j] && labels[j] == Label::Target) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            };
            if (c > 0) visit(i - 1);
            if (c + 1 < C) visit(i + 1);
            if (r > 0) visit(i - C);
            if (r + 1 < R) visit(i + C);
        }
        if (component.size() < prior.min_area || component.size() > prior.max_area)
            for (std::size_t i : component) out.set(i, Label::Background);
    }
    return out;
}

int collapse_check(const LabelMap& labels, int k, int k_switch, double shadow_floor) {
    if (k < 1) throw InvalidInput("collapse_check: iteration index starts at 1");
    if (k >= k_switch) return 2;
    const double shadow = static_cast<double>(labels.count(Label::Shadow));
    if (shadow < shadow_floor * static_cast<double>(labels.size())) return 2;
    return 3;
}

} // namespace semsar
