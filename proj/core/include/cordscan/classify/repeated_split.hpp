#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cordscan/classify/lda.hpp"
#include "cordscan/metrics.hpp"
#include "cordscan/regions/cohort.hpp"

namespace cordscan::classify {

/// Rows are level observations, columns the metrics of `combo` in order.
/// Label 0 = healthy (V) row, 1 = patient row with lesion_fraction > thr.
struct FeatureMatrix {
  Eigen::MatrixXd x;
  std::vector<int> y;
  double thr = 0.0;
  std::vector<Metric> combo;

  std::size_t positives() const;
  std::size_t negatives() const { return y.size() - positives(); }
};

/// NAWM rows and MS rows at or below thr are left out.
FeatureMatrix build_features(const regions::CohortTable& table, std::span<const Metric> combo, double thr);

struct SplitOptions {
  std::size_t n_splits = 1000;
  double train_frac = 0.67;
  std::uint64_t seed = 0;
  double ridge = kDefaultRidge;
  /// Fit the scaling on each training split instead of on all rows first.
  bool no_leak = false;
  unsigned threads = 1;
};

struct RocSummary {
  double thr = 0.0;
  std::vector<Metric> combo;
  double auc_mean = 0.0;
  double auc_std = 0.0;  // population std over splits
  std::size_t n_splits = 0;
  std::size_t n_pos = 0;  // rows per class before splitting
  std::size_t n_neg = 0;
  std::size_t n_pos_test = 0;  // per split
  std::size_t n_neg_test = 0;
  std::string error;  // set by run_combinations when the cell failed
};

/// Each split draws max(1, round((1 - train_frac) * n_c)) test rows from
/// each class c; the rest train. Split k is driven by its own stream keyed
/// by (seed, thr, combo, k), so the summary is independent of thread count.
/// Throws TooFewRows unless each class has at least 2 rows and every split
/// leaves at least 3 training rows.
RocSummary repeated_split_auc(const FeatureMatrix& features, const SplitOptions& options);

/// The eight metric combinations of 2 to 4 metrics studied by default.
std::vector<std::vector<Metric>> default_combos();

/// 0.02, 0.04, ..., 0.20.
std::vector<double> default_thresholds();

/// Every combo at every threshold, followed by each metric alone at every
/// threshold when `add_singletons` (skipping singletons already listed).
/// A failing cell gets NaN AUCs and its error message; the run continues.
std::vector<RocSummary> run_combinations(const regions::CohortTable& table,
                                         const std::vector<std::vector<Metric>>& combos,
                                         std::span<const double> thresholds, const SplitOptions& options,
                                         bool add_singletons = true);

/// Metric names joined with '&', e.g. "FWW&STICK_AD".
std::string combo_name(std::span<const Metric> combo);

}  // namespace cordscan::classify
