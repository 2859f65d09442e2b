#include <cstdio>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "cordscan/io/csv.hpp"
#include "cordscan/regions/cohort.hpp"
#include "cordscan/stats/correlation.hpp"
#include "cordscan/stats/pooling.hpp"
#include "cordscan/stats/welch.hpp"

namespace cordscan::cli {
namespace {

namespace fs = std::filesystem;
using io::format_number;

struct StatsOptions {
  fs::path table;
  fs::path out;
  fs::path report;
  std::string thr = "0.05,0.10";
  std::string rows = "all";
  double alpha = 0.05;
};

regions::CohortTable load(const fs::path& path) {
  require_file(path, "cohort table");
  return regions::read_cohort_csv(path);
}

int run_welch(const StatsOptions& o) {
  const regions::CohortTable table = load(o.table);
  const std::vector<double> thr = parse_thresholds(o.thr);
  const auto results = stats::compare_groups(table, thr);
  io::CsvTable csv;
  csv.header = {"metric", "group_a", "group_b", "n_a", "n_b", "mean_a", "sd_a", "mean_b", "sd_b", "t", "df", "p"};
  std::printf("%-9s %-12s %5s %13s %13s %10s\n", "metric", "vs V", "n", "mean V", "mean group", "p");
  for (const auto& r : results) {
    const auto& w = r.result;
    csv.rows.push_back({std::string(display_name(r.metric)), "V", r.label, std::to_string(w.n_a), std::to_string(w.n_b),
                        format_number(w.mean_a), format_number(w.sd_a), format_number(w.mean_b),
                        format_number(w.sd_b), format_number(w.t), format_number(w.df), format_number(w.p)});
    std::printf("%-9s %-12s %5zu %13.6g %13.6g %10.3g\n", std::string(display_name(r.metric)).c_str(),
                r.label.c_str(), w.n_b, w.mean_a, w.mean_b, w.p);
  }
  io::write_csv(csv, o.out);
  write_sidecar(o.out, "stats welch", {{"table", o.table.string()}, {"thresholds", thr}});
  if (results.empty()) {
    std::fprintf(stderr, "error: no comparison had at least two rows per group\n");
    return kDegenerate;
  }
  return kOk;
}

int run_corr(const StatsOptions& o) {
  const regions::CohortTable table = load(o.table);
  std::vector<std::size_t> rows;
  if (o.rows == "v") rows = regions::select_rows(table, regions::RowClass::V);
  if (o.rows == "nawm") rows = regions::select_rows(table, regions::RowClass::Nawm);
  if (o.rows == "ms") rows = regions::select_rows(table, regions::RowClass::Ms);
  if (o.rows != "all" && rows.empty()) {
    std::fprintf(stderr, "error: no %s rows in %s\n", o.rows.c_str(), o.table.string().c_str());
    return kDegenerate;
  }
  const stats::CorrelationMatrix r = stats::correlation_matrix(table, rows);
  io::CsvTable csv;
  csv.header = {"metric"};
  for (Metric m : kAllMetrics) csv.header.emplace_back(display_name(m));
  for (Metric a : kAllMetrics) {
    std::vector<std::string> line{std::string(display_name(a))};
    std::printf("%-9s", line[0].c_str());
    for (Metric b : kAllMetrics) {
      const double v = r(static_cast<Eigen::Index>(index(a)), static_cast<Eigen::Index>(index(b)));
      line.push_back(format_number(v));
      std::printf(" %7.3f", v);
    }
    std::printf("\n");
    csv.rows.push_back(std::move(line));
  }
  io::write_csv(csv, o.out);
  write_sidecar(o.out, "stats corr", {{"table", o.table.string()}, {"rows", o.rows}});
  return kOk;
}

int run_levels(const StatsOptions& o) {
  const regions::CohortTable table = load(o.table);
  std::vector<stats::LevelComparison> comparisons;
  for (Metric m : kAllMetrics) comparisons.push_back(stats::level_pooling(table, m, o.alpha));
  io::CsvTable pairs;
  pairs.header = {"metric", "level_a", "level_b", "emm_a", "emm_b", "diff", "se", "q", "p", "significant"};
  for (const auto& c : comparisons) {
    auto emm = [&](int level) {
      for (std::size_t i = 0; i < c.levels.size(); ++i) {
        if (c.levels[i] == level) return c.emm[i];
      }
      return 0.0;
    };
    for (const auto& p : c.pairs) {
      pairs.rows.push_back({std::string(display_name(c.metric)), "C" + std::to_string(p.level_a),
                            "C" + std::to_string(p.level_b), format_number(emm(p.level_a)),
                            format_number(emm(p.level_b)), format_number(p.diff), format_number(p.se),
                            format_number(p.q), format_number(p.p), p.significant ? "1" : "0"});
    }
  }
  io::write_csv(pairs, o.out);

  const stats::PoolingReport report = stats::pooling_report(comparisons);
  auto join = [](const std::vector<stats::LevelInterval>& v) {
    std::string s;
    for (const auto& i : v) s += (s.empty() ? "" : " ") + i.to_string();
    return s;
  };
  io::CsvTable intervals;
  intervals.header = {"metric", "intervals"};
  for (const auto& pm : report.per_metric) {
    intervals.rows.push_back({std::string(display_name(pm.metric)), join(pm.intervals)});
    std::printf("%-9s %s\n", intervals.rows.back()[0].c_str(), intervals.rows.back()[1].c_str());
  }
  intervals.rows.push_back({"INTERSECTION", join(report.intersection)});
  intervals.rows.push_back({"POOLED", join(report.pooled())});
  std::printf("%-9s %s\npooled    %s\n", "all", join(report.intersection).c_str(), join(report.pooled()).c_str());
  if (!o.report.empty()) io::write_csv(intervals, o.report);
  write_sidecar(o.out, "stats levels", {{"table", o.table.string()}, {"alpha", o.alpha}});
  return kOk;
}

void common_options(CLI::App& sub, StatsOptions& o) {
  sub.add_option("--table", o.table, "cohort CSV")->required();
  sub.add_option("--out", o.out, "output CSV")->required();
}

}  // namespace

void add_stats_command(CLI::App& root, Action& action) {
  CLI::App* stats = root.add_subcommand("stats", "Group comparisons, metric correlations and level pooling");
  stats->require_subcommand(1);

  auto welch = std::make_shared<StatsOptions>();
  CLI::App* w = stats->add_subcommand("welch", "Welch t-tests of V against NAWM and MS(thr) rows, per metric");
  common_options(*w, *welch);
  w->add_option("--thr", welch->thr, "lesion-fraction thresholds, e.g. 0.05,0.10")->capture_default_str();
  w->callback([welch, &action] { action = [welch] { return run_welch(*welch); }; });

  auto corr = std::make_shared<StatsOptions>();
  CLI::App* c = stats->add_subcommand("corr", "6 x 6 Pearson correlation matrix of the metrics");
  common_options(*c, *corr);
  c->add_option("--rows", corr->rows, "all, v, nawm or ms")
      ->check(CLI::IsMember({"all", "v", "nawm", "ms"}))
      ->capture_default_str();
  c->callback([corr, &action] { action = [corr] { return run_corr(*corr); }; });

  auto levels = std::make_shared<StatsOptions>();
  CLI::App* l = stats->add_subcommand("levels", "Pairwise level comparisons (Tukey) and the pooling report");
  common_options(*l, *levels);
  l->add_option("--report", levels->report, "CSV of poolable level intervals per metric");
  l->add_option("--alpha", levels->alpha, "family-wise significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  l->callback([levels, &action] { action = [levels] { return run_levels(*levels); }; });
}

}  // namespace cordscan::cli
