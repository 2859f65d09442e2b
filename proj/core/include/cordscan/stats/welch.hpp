#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cordscan/metrics.hpp"
#include "cordscan/regions/cohort.hpp"

namespace cordscan::stats {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p = 1.0;   // two-sided
  double mean_a = 0.0;
  double mean_b = 0.0;
  double sd_a = 0.0;  // sample sd (n - 1)
  double sd_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  /// Both samples constant: t is 0 (equal means, p = 1) or +-inf (p = 0),
  /// and df is n_a + n_b - 2.
  bool degenerate = false;
};

/// Welch's unequal-variance t-test of mean(a) - mean(b). Throws
/// InsufficientSamples when either sample has fewer than two values or
/// contains a non-finite value.
WelchResult welch(std::span<const double> a, std::span<const double> b);

/// One comparison of a row class against the healthy rows, e.g. "MS(10%)".
struct GroupComparison {
  std::string label;
  Metric metric = Metric::Fww;
  WelchResult result;
};

/// V against NAWM, then V against MS(thr) for each threshold, for every
/// metric: the layout of a per-metric group comparison table. Comparisons
/// whose groups are too small are skipped with a warning.
std::vector<GroupComparison> compare_groups(const regions::CohortTable& table, std::span<const double> thresholds,
                                            std::span<const Metric> metrics = kAllMetrics);

/// "MS(5%)" style label for a threshold.
std::string ms_label(double thr);

}  // namespace cordscan::stats
