#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cordscan/metrics.hpp"
#include "cordscan/regions/cohort.hpp"

namespace cordscan::stats {

/// One pairwise level contrast, level_a < level_b.
struct PairComparison {
  int level_a = 0;
  int level_b = 0;
  double diff = 0.0;  // emm(level_a) - emm(level_b)
  double se = 0.0;
  double q = 0.0;  // studentized range statistic |diff| / se * sqrt(2)
  double p = 1.0;  // Tukey-adjusted
  bool significant = false;
};

/// Additive subject + level fit of one metric and its pairwise level tests.
struct LevelComparison {
  Metric metric = Metric::Fww;
  std::vector<int> levels;   // ascending
  std::vector<double> emm;   // estimated marginal mean per level
  std::vector<double> emm_se;
  double sigma = 0.0;        // residual standard deviation
  double df = 0.0;           // residual degrees of freedom
  std::size_t observations = 0;
  std::vector<PairComparison> pairs;  // (levels[i], levels[j]), i < j, row-major

  /// Either order of the pair; nullptr when a level is absent.
  const PairComparison* find(int a, int b) const;
  bool significant(int a, int b) const;
};

/// Least-squares fit of value = mu + subject + level + residual, then every
/// pair of levels compared on the estimated marginal means with the pooled
/// residual variance and a Tukey-Kramer adjustment over all levels.
///
/// Throws UnbalancedDesignUnderdetermined when a level is observed for
/// fewer than two subjects, when the level effects are not estimable from
/// the design, or when no residual degrees of freedom remain.
LevelComparison level_pooling(std::span<const std::string> subjects, std::span<const int> levels,
                              std::span<const double> values, double alpha = 0.05);

/// Same, over every row of the table for one metric.
LevelComparison level_pooling(const regions::CohortTable& table, Metric metric, double alpha = 0.05);

/// Closed run of adjacent levels, e.g. C2-C4.
struct LevelInterval {
  int first = 0;
  int last = 0;

  std::size_t size(std::span<const int> levels) const;
  std::string to_string() const;  // "C2-C4", or "C3" for a single level
  bool operator==(const LevelInterval&) const = default;
};

struct MetricIntervals {
  Metric metric = Metric::Fww;
  std::vector<LevelInterval> intervals;
};

struct PoolingReport {
  std::vector<int> levels;
  std::vector<MetricIntervals> per_metric;
  /// Maximal runs in which no pair is significant for any metric.
  std::vector<LevelInterval> intersection;

  /// Intersection runs spanning more than one level.
  std::vector<LevelInterval> pooled() const;
};

/// Maximal runs of adjacent levels (in the given ascending order) in which
/// no pair is flagged. Runs may overlap.
std::vector<LevelInterval> maximal_runs(std::span<const int> levels,
                                        const std::function<bool(int, int)>& significant);

/// Comparisons must share one level set.
PoolingReport pooling_report(std::span<const LevelComparison> comparisons);

}  // namespace cordscan::stats
