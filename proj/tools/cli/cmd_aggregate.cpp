#include <cstdio>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "cordscan/error.hpp"
#include "cordscan/io/labels.hpp"
#include "cordscan/io/nifti.hpp"
#include "cordscan/regions/cohort.hpp"

namespace cordscan::cli {
namespace {

namespace fs = std::filesystem;

struct AggregateOptions {
  fs::path maps;
  fs::path levels_map;
  fs::path wm;
  fs::path lesion;
  fs::path out;
  std::string subject;
  std::string group = "healthy";
  std::string levels = "2-4";
  std::string weighting = "partial";
  bool append = false;
};

int run_aggregate(const AggregateOptions& o) {
  const std::vector<int> levels = parse_levels(o.levels);
  const regions::Group group = regions::parse_group(o.group);
  std::array<fs::path, kMetricCount> map_paths;
  for (Metric m : kAllMetrics) {
    map_paths[index(m)] = o.maps / (std::string(column_name(m)) + ".nii.gz");
    require_file(map_paths[index(m)], std::string(display_name(m)) + " map");
  }
  require_file(o.levels_map, "level label map");
  require_file(o.wm, "white-matter weight map");
  if (!o.lesion.empty()) require_file(o.lesion, "lesion mask");
  if (o.append && fs::exists(o.out)) require_file(o.out, "cohort table");

  const io::LabelMap labels = io::read_label_map(o.levels_map, o.wm, o.lesion);
  std::array<io::Volume, kMetricCount> volumes;
  regions::MetricMaps maps{};
  for (Metric m : kAllMetrics) {
    volumes[index(m)] = io::read_volume(map_paths[index(m)]);
    labels.require_grid(volumes[index(m)].geometry());
    maps[index(m)] = &volumes[index(m)];
  }
  const auto weighting = o.weighting == "binary" ? regions::Weighting::Binary : regions::Weighting::PartialVolume;
  regions::SubjectRecord record{o.subject, group, regions::summarize_subject(o.subject, maps, labels, levels, weighting)};
  if (record.levels.levels.empty()) {
    std::fprintf(stderr, "error: subject %s has no white matter in levels %s\n", o.subject.c_str(), o.levels.c_str());
    return kDegenerate;
  }
  const regions::CohortTable rows = regions::build_cohort({record}, levels);

  regions::CohortTable table;
  if (o.append && fs::exists(o.out)) table = regions::read_cohort_csv(o.out);
  table.rows.insert(table.rows.end(), rows.rows.begin(), rows.rows.end());
  table.validate();
  regions::write_cohort_csv(table, o.out);
  write_sidecar(o.out, "aggregate",
                {{"levels", levels},
                 {"weighting", o.weighting},
                 {"rows", table.rows.size()},
                 {"last_subject", o.subject}});
  std::printf("aggregate %s: %zu level rows (%zu in %s)\n", o.subject.c_str(), rows.rows.size(), table.rows.size(),
              o.out.string().c_str());
  return kOk;
}

}  // namespace

void add_aggregate_command(CLI::App& root, Action& action) {
  auto o = std::make_shared<AggregateOptions>();
  CLI::App* sub = root.add_subcommand(
      "aggregate", "WM-weighted per-level means of the fitted maps and lesion fractions, as cohort CSV rows");
  sub->add_option("--maps", o->maps, "directory with fww, stick_ad, ad, fa, md, rd .nii.gz maps")->required();
  sub->add_option("--levels-map", o->levels_map, "vertebral level labels (0 background, 1..7)")->required();
  sub->add_option("--wm", o->wm, "white-matter partial-volume weights in [0, 1]")->required();
  sub->add_option("--lesion", o->lesion, "lesion mask (required for patients)");
  sub->add_option("--subject", o->subject, "subject id")->required();
  sub->add_option("--group", o->group, "healthy or patient")
      ->check(CLI::IsMember({"healthy", "patient"}))
      ->capture_default_str();
  sub->add_option("--levels", o->levels, "levels to report, e.g. 2-4 or 1-7")->capture_default_str();
  sub->add_option("--weighting", o->weighting, "partial (weights) or binary (wm >= 0.5)")
      ->check(CLI::IsMember({"partial", "binary"}))
      ->capture_default_str();
  sub->add_option("--out", o->out, "cohort CSV")->required();
  sub->add_flag("--append", o->append, "add rows to an existing cohort CSV");
  sub->callback([o, &action] { action = [o] { return run_aggregate(*o); }; });
}

}  // namespace cordscan::cli
