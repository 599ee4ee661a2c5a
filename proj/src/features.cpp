#include "semsar/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace semsar {

const GammaFeature& SemanticFeatures::operator[](Label l) const {
    if (!has(l)) throw InvalidInput("no features for class '" + std::string(to_string(l)) + "'");
    return f_[index(l)];
}

void SemanticFeatures::set(Label l, GammaFeature f) {
    if (!(f.shape > 0.0 && f.shape <= 1.0)) throw InvalidInput("Gamma shape must lie in (0, 1]");
    if (!(f.scale > 0.0) || !std::isfinite(f.scale)) throw InvalidInput("Gamma scale must be positive and finite");
    f_[index(l)] = f;
    active_[index(l)] = true;
}

int SemanticFeatures::active_count() const noexcept {
    return static_cast<int>(std::count(active_.begin(), active_.end(), true));
}

SemanticFeatures SemanticFeatures::uniform(double shape, double scale, bool with_shadow) {
    SemanticFeatures f;
    f.set(Label::Target, {shape, scale});
    f.set(Label::Background, {shape, scale});
    if (with_shadow) f.set(Label::Shadow, {shape, scale});
    return f;
}

ClassStats class_stats(const ComplexImage& g, const LabelMap& y, double eps) {
    if (!y.same_shape(g)) throw InvalidInput("class_stats: image and label shapes differ");
    ClassStats st;
    st.eps = eps;
    for (auto& s : st.per_class) {
        s.min = std::numeric_limits<double>::infinity();
        s.max = 0.0;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto& s = st.per_class[index(y[i])];
        const double m = std::abs(g[i]);
        ++s.count;
        s.sum += m;
        s.sum_log += std::log(m + eps);
        s.min = std::min(s.min, m);
        s.max = std::max(s.max, m);
    }
    for (auto& s : st.per_class) {
        if (s.count == 0) {
            s = ClassSummary{};
            continue;
        }
        const double n = static_cast<double>(s.count);
        s.mean = s.sum / n;
        s.mean_log = s.sum_log / n;
    }
    return st;
}

double scale_update(double mean, double shape) {
    if (!(shape > 0.0 && shape <= 1.0)) throw InvalidInput("scale_update: shape must lie in (0, 1]");
    if (!(mean > 0.0)) throw DegenerateInput("scale_update: class mean magnitude is zero");
    return mean / shape;
}

double shape_mle_approx(std::size_t count, double mean, double mean_log) {
    if (count == 0) throw DegenerateInput("shape_mle_approx: no samples");
    if (!(mean > 0.0)) throw DegenerateInput("shape_mle_approx: mean must be positive");
    const double s = std::log(mean) - mean_log;
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw DegenerateInput("shape_mle_approx: log-mean gap is not positive (constant samples)");
    }
    const double t = 3.0 - s;
    return (t + std::sqrt(t * t + 24.0 * s)) / (12.0 * s);
}

namespace {

constexpr std::array<Label, 3> kChain{Label::Target, Label::Background, Label::Shadow};

// Zero-magnitude classes keep a finite weight scale.
double effective_mean(const ClassSummary& s, double eps) { return std::max(s.mean, eps); }

// Restrict iv to {a : p + q a <= r}.
void restrict_linear(ShapeInterval& iv, double p, double q, double r) {
    const double slack = 1e-15 * std::max({1.0, std::abs(p), std::abs(r)});
    if (std::abs(q) <= 1e-300) {
        if (p > r + slack) iv.empty = true;
        return;
    }
    // Pull the bound inwards a little so that a shape clamped onto it still
    // satisfies the inequality after the weights are recomputed in floating point.
    const double raw = (r - p) / q;
    const double bound = raw + (q > 0.0 ? -1.0 : 1.0) * 1e-12 * std::max(1.0, std::abs(raw));
    if (q > 0.0) {
        iv.hi = std::min(iv.hi, bound);
    } else {
        iv.lo = std::max(iv.lo, bound);
    }
    if (iv.lo > iv.hi) iv.empty = true;
}

double neighbour_shape(const SemanticFeatures& f, Label l) { return f.has(l) ? f[l].shape : 1.0; }

} // namespace

double class_max_weight(const ClassSummary& s, double shape, double eps) {
    return shape / effective_mean(s, eps) + (1.0 - shape) / (s.min + eps);
}

double class_min_weight(const ClassSummary& s, double shape, double eps) {
    return shape / effective_mean(s, eps) + (1.0 - shape) / (s.max + eps);
}

ShapeInterval shape_feasible_set(Label c, const ClassStats& stats, const SemanticFeatures& current) {
    ShapeInterval iv{kMinShape, 1.0, false};
    const double eps = stats.eps;
    const auto& sc = stats[c];
    if (sc.empty()) return iv;

    std::vector<Label> chain;
    for (Label l : kChain)
        if (!stats[l].empty()) chain.push_back(l);
    const auto pos = static_cast<std::size_t>(std::find(chain.begin(), chain.end(), c) - chain.begin());

    const double mu = effective_mean(sc, eps);
    // max weight of c: 1/(min+eps) + a (1/mu - 1/(min+eps))
    const double p_max = 1.0 / (sc.min + eps);
    const double q_max = 1.0 / mu - p_max;
    // min weight of c: 1/(max+eps) + a (1/mu - 1/(max+eps))
    const double p_min = 1.0 / (sc.max + eps);
    const double q_min = 1.0 / mu - p_min;

    if (pos + 1 < chain.size()) {
        // Heavier neighbour: every weight of c must stay below its smallest weight.
        const Label h = chain[pos + 1];
        const auto& sh = stats[h];
        restrict_linear(iv, p_max, q_max, class_min_weight(sh, neighbour_shape(current, h), eps));
        restrict_linear(iv, p_max, q_max, 1.0 / effective_mean(sh, eps));
    }
    if (pos > 0) {
        // Lighter neighbour: every weight of c must stay above its largest weight.
        const Label l = chain[pos - 1];
        const auto& sl = stats[l];
        restrict_linear(iv, -p_min, -q_min, -class_max_weight(sl, neighbour_shape(current, l), eps));
        restrict_linear(iv, -p_min, -q_min, -1.0 / effective_mean(sl, eps));
    }
    if (iv.lo > iv.hi) iv.empty = true;
    return iv;
}

double gamma_objective(const ClassStats& stats, const SemanticFeatures& theta) {
    double total = 0.0;
    for (Label l : kAllLabels) {
        const auto& s = stats[l];
        if (s.empty() || !theta.has(l)) continue;
        const double a = theta[l].shape;
        const double b = theta[l].scale;
        const double n = static_cast<double>(s.count);
        total += n * std::lgamma(a) + n * a * std::log(b) + s.sum / b + (1.0 - a) * s.sum_log;
    }
    return total;
}

FeatureUpdate feature_update(const ComplexImage& g, const LabelMap& y, double eps, const SemanticFeatures& previous,
                             const FeatureConfig& cfg) {
    const ClassStats stats = class_stats(g, y, eps);
    if (stats[Label::Target].empty()) throw DegenerateInput("feature_update: target class is empty");

    FeatureUpdate out;
    SemanticFeatures theta;
    std::array<double, 3> unconstrained{1.0, 1.0, 1.0};
    for (Label l : kAllLabels) {
        const auto& s = stats[l];
        if (s.empty()) continue;
        const double a_prev = previous.has(l) ? previous[l].shape : 1.0;
        const double mu = effective_mean(s, eps);
        theta.set(l, {a_prev, mu / a_prev});
        try {
            unconstrained[index(l)] = std::min(1.0, shape_mle_approx(s.count, mu, s.mean_log));
        } catch (const DegenerateInput&) {
            unconstrained[index(l)] = 1.0;
        }
    }

    double last = std::numeric_limits<double>::quiet_NaN();
    for (int pass = 1; pass <= cfg.max_passes; ++pass) {
        for (Label l : kChain) {
            if (stats[l].empty()) continue;
            const ShapeInterval q = shape_feasible_set(l, stats, theta);
            if (q.empty) {
                out.fallback = true;
                break;
            }
            const double a = q.clamp(unconstrained[index(l)]);
            theta.set(l, {a, scale_update(effective_mean(stats[l], eps), a)});
        }
        if (out.fallback) break;
        out.passes = pass;
        const double obj = gamma_objective(stats, theta);
        out.objective.push_back(obj);
        if (pass > 1 && std::abs(obj - last) <= cfg.tol * std::max(1.0, std::abs(obj))) break;
        last = obj;
    }

    if (out.fallback) {
        // Unit shapes make each class weight the constant 1/b_c; order the
        // scales so that b_t >= b_b >= b_s.
        double ceiling = std::numeric_limits<double>::infinity();
        for (Label l : kChain) {
            if (stats[l].empty()) continue;
            const double b = std::min(effective_mean(stats[l], eps), ceiling);
            theta.set(l, {1.0, b});
            ceiling = b;
        }
        theta.set_constrained(false);
        out.objective.push_back(gamma_objective(stats, theta));
    } else {
        theta.set_constrained(true);
    }
    out.features = theta;
    return out;
}

} // namespace semsar
