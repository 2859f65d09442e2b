#include "cordscan/regions/regions.hpp"

#include <cmath>
#include <vector>

#include "cordscan/error.hpp"
#include "cordscan/log.hpp"

namespace cordscan::regions {
namespace {

double weight_of(double wm, Weighting weighting) {
  if (weighting == Weighting::Binary) return wm >= kBinaryWmThreshold ? 1.0 : 0.0;
  return wm;
}

std::string level_name(int level) { return "C" + std::to_string(level); }

}  // namespace

RegionMean aggregate_level(const io::Volume& metric, const io::LabelMap& labels, int level, Weighting weighting) {
  labels.require_grid(metric.geometry());
  if (metric.frames() != 1) throw Error(ErrorCode::DimensionMismatch, "metric map must be 3D");
  RegionMean r;
  double weighted = 0.0;
  for (std::size_t v = 0; v < metric.voxel_count(); ++v) {
    if (labels.levels(v) != level) continue;
    const double w = weight_of(labels.wm_weight(v), weighting);
    if (w <= 0.0) continue;
    weighted += w * metric(v);
    r.weight_sum += w;
    ++r.voxel_count;
  }
  if (!(r.weight_sum > 0.0)) throw Error(ErrorCode::EmptyRegion, "no white-matter weight in level " + level_name(level));
  r.mean = weighted / r.weight_sum;
  return r;
}

std::size_t count_components(const io::Volume& mask, const std::vector<bool>& keep) {
  const auto& g = mask.geometry();
  const std::size_t n = g.voxel_count();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  std::size_t components = 0;
  auto on = [&](std::size_t v) { return keep[v] && mask(v) != 0.0; };
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start] || !on(start)) continue;
    ++components;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      const auto c = g.coords(v);
      for (std::size_t axis = 0; axis < 3; ++axis) {
        for (int step : {-1, 1}) {
          if (step < 0 && c[axis] == 0) continue;
          if (step > 0 && c[axis] + 1 >= g.dims[axis]) continue;
          auto nc = c;
          nc[axis] = step < 0 ? c[axis] - 1 : c[axis] + 1;
          const std::size_t u = g.index(nc[0], nc[1], nc[2]);
          if (!seen[u] && on(u)) {
            seen[u] = 1;
            stack.push_back(u);
          }
        }
      }
    }
  }
  return components;
}

LesionStats lesion_stats(const io::LabelMap& labels, int level) {
  if (!labels.lesion) throw Error(ErrorCode::MissingLesionMask, "lesion statistics need a lesion mask");
  const io::Volume& lesion = *labels.lesion;
  LesionStats s;
  s.level = level;
  std::vector<bool> in_level(labels.levels.voxel_count());
  for (std::size_t v = 0; v < in_level.size(); ++v) {
    in_level[v] = labels.levels(v) == level;
    if (!in_level[v]) continue;
    ++s.level_voxels;
    if (lesion(v) != 0.0) ++s.lesion_voxels;
  }
  if (s.level_voxels == 0) throw Error(ErrorCode::EmptyRegion, "level " + level_name(level) + " has no voxels");
  s.lesion_fraction = static_cast<double>(s.lesion_voxels) / static_cast<double>(s.level_voxels);
  s.lesion_count = s.lesion_voxels == 0 ? 0 : count_components(lesion, in_level);
  return s;
}

SubjectLevels summarize_subject(const std::string& subject, const MetricMaps& maps, const io::LabelMap& labels,
                                const std::vector<int>& levels, Weighting weighting) {
  SubjectLevels out;
  for (int level : levels) {
    LevelSummary summary;
    summary.subject = subject;
    summary.level = level;
    try {
      for (Metric m : kAllMetrics) {
        const RegionMean r = aggregate_level(*maps[index(m)], labels, level, weighting);
        summary.metrics[index(m)] = r.mean;
        summary.wm_weight_sum = r.weight_sum;
        summary.voxel_count = r.voxel_count;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyRegion) throw;
      log::warn(subject + ": skipping " + level_name(level) + ": " + e.what());
      continue;
    }
    out.levels.push_back(summary);
    if (labels.lesion) out.lesions.push_back(lesion_stats(labels, level));
  }
  return out;
}

}  // namespace cordscan::regions
