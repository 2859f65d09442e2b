#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cordscan/metrics.hpp"
#include "cordscan/regions/regions.hpp"

namespace cordscan::regions {

enum class Group { Healthy, Patient };

Group parse_group(const std::string& name);
std::string to_string(Group group);

/// Healthy rows form V; patient rows are NAWM without lesion voxels, MS otherwise.
enum class RowClass { V, Nawm, Ms };

struct CohortRow {
  std::string subject;
  Group group = Group::Healthy;
  int level = 0;
  MetricValues metrics{};
  double lesion_fraction = 0.0;

  RowClass row_class() const noexcept;
  double metric(Metric m) const noexcept { return metrics[index(m)]; }
};

struct CohortTable {
  std::vector<CohortRow> rows;

  /// Throws DuplicateRow on a repeated (subject, level) pair and
  /// InvalidArgument on a non-finite metric or a fraction outside [0, 1].
  void validate() const;
};

struct SubjectRecord {
  std::string subject;
  Group group = Group::Healthy;
  SubjectLevels levels;
};

/// Levels 2-4 (C2-C4), the pooled region used for group comparisons.
std::vector<int> default_cohort_levels();

/// One row per (subject, level) for the requested levels. Patients need
/// lesion statistics for every level they contribute (MissingLesionMask
/// otherwise); healthy subjects without a lesion map get fraction 0.
/// Throws DuplicateRow.
CohortTable build_cohort(const std::vector<SubjectRecord>& subjects,
                         const std::vector<int>& levels = default_cohort_levels());

/// Indices of patient rows with lesion_fraction > thr. Throws
/// InvalidArgument unless 0 <= thr <= 1.
std::vector<std::size_t> select_ms_rows(const CohortTable& table, double thr);

std::vector<std::size_t> select_rows(const CohortTable& table, RowClass row_class);

/// Columns subject,group,level,fww,stick_ad,ad,fa,md,rd,lesion_fraction.
void write_cohort_csv(const CohortTable& table, const std::filesystem::path& path);
CohortTable read_cohort_csv(const std::filesystem::path& path);

}  // namespace cordscan::regions
