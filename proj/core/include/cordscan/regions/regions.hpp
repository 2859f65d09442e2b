#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cordscan/io/labels.hpp"
#include "cordscan/io/volume.hpp"
#include "cordscan/metrics.hpp"

namespace cordscan::regions {

enum class Weighting {
  PartialVolume,  // w = wm_weight
  Binary,         // w = 1 where wm_weight >= kBinaryWmThreshold, else 0
};

inline constexpr double kBinaryWmThreshold = 0.5;

struct RegionMean {
  double mean = 0.0;
  double weight_sum = 0.0;
  std::size_t voxel_count = 0;  // voxels with w > 0
};

/// Sum(w * m) / Sum(w) over voxels labeled `level`. Throws EmptyRegion when
/// the weights sum to zero, DimensionMismatch when the grids differ.
RegionMean aggregate_level(const io::Volume& metric, const io::LabelMap& labels, int level,
                           Weighting weighting = Weighting::PartialVolume);

struct LesionStats {
  int level = 0;
  std::size_t lesion_count = 0;   // 6-connected components inside the level
  std::size_t lesion_voxels = 0;
  std::size_t level_voxels = 0;
  double lesion_fraction = 0.0;   // lesion_voxels / level_voxels
};

/// Throws MissingLesionMask without a lesion map and EmptyRegion when no
/// voxel carries the level label.
LesionStats lesion_stats(const io::LabelMap& labels, int level);

/// Connected components of the non-zero voxels of `mask` restricted to
/// voxels where `keep` is true, using face (6-) connectivity.
std::size_t count_components(const io::Volume& mask, const std::vector<bool>& keep);

struct LevelSummary {
  std::string subject;
  int level = 0;
  MetricValues metrics{};
  double wm_weight_sum = 0.0;
  std::size_t voxel_count = 0;
};

/// One metric volume per Metric, in kAllMetrics order.
using MetricMaps = std::array<const io::Volume*, kMetricCount>;

struct SubjectLevels {
  std::vector<LevelSummary> levels;
  std::vector<LesionStats> lesions;  // empty without a lesion map
};

/// Aggregates every requested level. Levels whose region is empty are
/// skipped with a warning rather than failing the subject.
SubjectLevels summarize_subject(const std::string& subject, const MetricMaps& maps, const io::LabelMap& labels,
                                const std::vector<int>& levels, Weighting weighting = Weighting::PartialVolume);

}  // namespace cordscan::regions
