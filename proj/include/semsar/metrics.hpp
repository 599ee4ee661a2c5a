#pragma once

#include <limits>

#include "semsar/grid.hpp"
#include "semsar/label_map.hpp"

namespace semsar {

/// N counts the non-target pixels, so the denominator is the mean clutter
/// magnitude. Returns +inf when every non-target pixel is exactly zero.
double ptcr_db(const ComplexImage& g, const LabelMap& truth);

/// Mean |g|^2 over target pixels.
double avg_target_intensity(const ComplexImage& g, const LabelMap& truth);

/// Fraction of truth target pixels labelled Target.
double target_recall(const LabelMap& predicted, const LabelMap& truth);
/// Fraction of predicted target pixels that are truth targets (0 when none
/// are predicted).
double target_precision(const LabelMap& predicted, const LabelMap& truth);

struct MetricReport {
    double ptcr_db = 0.0;
    double chi_t = 0.0;
    double recall = std::numeric_limits<double>::quiet_NaN();
    double precision = std::numeric_limits<double>::quiet_NaN();

    bool ptcr_infinite() const noexcept { return ptcr_db == std::numeric_limits<double>::infinity(); }
};

/// Recall and precision stay NaN unless a predicted label map is supplied.
MetricReport evaluate(const ComplexImage& g, const LabelMap& truth, const LabelMap* predicted = nullptr);

/// Pixels with |g| < fraction * max|g| among the non-target (background and
/// shadow) pixels of `where`.
std::size_t near_zero_clutter(const ComplexImage& g, const LabelMap& where, double fraction = 0.05);

} // namespace semsar
