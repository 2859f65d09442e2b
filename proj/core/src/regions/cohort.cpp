#include "cordscan/regions/cohort.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "cordscan/error.hpp"
#include "cordscan/io/csv.hpp"

namespace cordscan::regions {

Group parse_group(const std::string& name) {
  if (name == "healthy") return Group::Healthy;
  if (name == "patient") return Group::Patient;
  throw Error(ErrorCode::InvalidArgument, "group must be 'healthy' or 'patient', got '" + name + "'");
}

std::string to_string(Group group) { return group == Group::Healthy ? "healthy" : "patient"; }

RowClass CohortRow::row_class() const noexcept {
  if (group == Group::Healthy) return RowClass::V;
  return lesion_fraction > 0.0 ? RowClass::Ms : RowClass::Nawm;
}

void CohortTable::validate() const {
  std::set<std::pair<std::string, int>> seen;
  for (const auto& r : rows) {
    if (!seen.emplace(r.subject, r.level).second) {
      throw Error(ErrorCode::DuplicateRow, "subject " + r.subject + " level " + std::to_string(r.level) + " repeated");
    }
    for (double v : r.metrics) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite metric for subject " + r.subject);
    }
    if (!(r.lesion_fraction >= 0.0 && r.lesion_fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "lesion fraction outside [0, 1] for subject " + r.subject);
    }
  }
}

std::vector<int> default_cohort_levels() { return {2, 3, 4}; }

CohortTable build_cohort(const std::vector<SubjectRecord>& subjects, const std::vector<int>& levels) {
  const std::set<int> wanted(levels.begin(), levels.end());
  CohortTable table;
  for (const auto& s : subjects) {
    for (const auto& summary : s.levels.levels) {
      if (!wanted.count(summary.level)) continue;
      CohortRow row;
      row.subject = s.subject;
      row.group = s.group;
      row.level = summary.level;
      row.metrics = summary.metrics;
      const LesionStats* lesion = nullptr;
      for (const auto& l : s.levels.lesions) {
        if (l.level == summary.level) lesion = &l;
      }
      if (lesion) {
        row.lesion_fraction = lesion->lesion_fraction;
      } else if (s.group == Group::Patient) {
        throw Error(ErrorCode::MissingLesionMask,
                    "patient " + s.subject + " has no lesion statistics for level " + std::to_string(summary.level));
      }
      table.rows.push_back(std::move(row));
    }
  }
  table.validate();
  return table;
}

std::vector<std::size_t> select_ms_rows(const CohortTable& table, double thr) {
  if (!(thr >= 0.0 && thr <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lesion threshold must lie in [0, 1]");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (r.group == Group::Patient && r.lesion_fraction > thr) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> select_rows(const CohortTable& table, RowClass row_class) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].row_class() == row_class) out.push_back(i);
  }
  return out;
}

void write_cohort_csv(const CohortTable& table, const std::filesystem::path& path) {
  io::CsvTable csv;
  csv.header = {"subject", "group", "level"};
  for (Metric m : kAllMetrics) csv.header.emplace_back(column_name(m));
  csv.header.emplace_back("lesion_fraction");
  for (const auto& r : table.rows) {
    std::vector<std::string> fields = {r.subject, to_string(r.group), std::to_string(r.level)};
    for (double v : r.metrics) fields.push_back(io::format_number(v));
    fields.push_back(io::format_number(r.lesion_fraction));
    csv.rows.push_back(std::move(fields));
  }
  io::write_csv(csv, path);
}

CohortTable read_cohort_csv(const std::filesystem::path& path) {
  const io::CsvTable csv = io::read_csv(path);
  const std::size_t subject = csv.column("subject");
  const std::size_t group = csv.column("group");
  const std::size_t level = csv.column("level");
  const std::size_t fraction = csv.column("lesion_fraction");
  std::array<std::size_t, kMetricCount> metric_col{};
  for (Metric m : kAllMetrics) metric_col[index(m)] = csv.column(column_name(m));

  CohortTable table;
  for (const auto& fields : csv.rows) {
    CohortRow r;
    r.subject = fields[subject];
    r.group = parse_group(fields[group]);
    const double l = io::parse_number(fields[level]);
    if (l != std::round(l) || l < io::kMinLevel || l > io::kMaxLevel) {
      throw Error(ErrorCode::InvalidArgument, "level must be an integer in 1..7, got " + fields[level]);
    }
    r.level = static_cast<int>(l);
    for (Metric m : kAllMetrics) r.metrics[index(m)] = io::parse_number(fields[metric_col[index(m)]]);
    r.lesion_fraction = io::parse_number(fields[fraction]);
    table.rows.push_back(std::move(r));
  }
  table.validate();
  return table;
}

}  // namespace cordscan::regions
