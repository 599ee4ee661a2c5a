#include "semsar/metrics.hpp"

#include <cmath>

#include "semsar/error.hpp"

namespace semsar {

namespace {

void check_shapes(const ComplexImage& g, const LabelMap& truth) {
    if (!truth.same_shape(g)) throw InvalidInput("metrics: image and label shapes differ");
}

} // namespace

double ptcr_db(const ComplexImage& g, const LabelMap& truth) {
    check_shapes(g, truth);
    double peak = 0.0, clutter = 0.0;
    std::size_t n_target = 0, n_clutter = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = std::abs(g[i]);
        if (truth[i] == Label::Target) {
            peak = std::max(peak, m);
            ++n_target;
        } else {
            clutter += m;
            ++n_clutter;
        }
    }
    if (n_target == 0 || n_clutter == 0) throw InvalidInput("ptcr: need target and non-target pixels");
    if (clutter == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(static_cast<double>(n_clutter) * peak / clutter);
}

double avg_target_intensity(const ComplexImage& g, const LabelMap& truth) {
    check_shapes(g, truth);
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (truth[i] == Label::Target) {
            s += std::norm(g[i]);
            ++n;
        }
    if (n == 0) throw InvalidInput("avg_target_intensity: no target pixels");
    return s / static_cast<double>(n);
}

double target_recall(const LabelMap& predicted, const LabelMap& truth) {
    if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols())
        throw InvalidInput("recall: label shapes differ");
    std::size_t tp = 0, pos = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == Label::Target) {
            ++pos;
            if (predicted[i] == Label::Target) ++tp;
        }
    if (pos == 0) throw InvalidInput("recall: no truth target pixels");
    return static_cast<double>(tp) / static_cast<double>(pos);
}

double target_precision(const LabelMap& predicted, const LabelMap& truth) {
    if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols())
        throw InvalidInput("precision: label shapes differ");
    std::size_t tp = 0, pred = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predicted[i] == Label::Target) {
            ++pred;
            if (truth[i] == Label::Target) ++tp;
        }
    return pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pred);
}

MetricReport evaluate(const ComplexImage& g, const LabelMap& truth, const LabelMap* predicted) {
    MetricReport r;
    r.ptcr_db = ptcr_db(g, truth);
    r.chi_t = avg_target_intensity(g, truth);
    if (predicted) {
        r.recall = target_recall(*predicted, truth);
        r.precision = target_precision(*predicted, truth);
    }
    return r;
}

std::size_t near_zero_clutter(const ComplexImage& g, const LabelMap& where, double fraction) {
    check_shapes(g, where);
    const double cut = fraction * max_magnitude(g);
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (where[i] != Label::Target && std::abs(g[i]) < cut) ++n;
    return n;
}

} // namespace semsar
