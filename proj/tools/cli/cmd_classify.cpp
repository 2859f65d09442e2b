#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "cordscan/io/csv.hpp"
#include "cordscan/regions/cohort.hpp"
#include "svg.hpp"

namespace cordscan::cli {
namespace {

namespace fs = std::filesystem;

struct ClassifyOptions {
  fs::path table;
  fs::path out;
  fs::path svg;
  std::string combos;
  std::string thr = "0.02:0.20:0.02";
  std::size_t splits = 1000;
  std::uint64_t seed = 0;
  double train_frac = 0.67;
  double ridge = classify::kDefaultRidge;
  bool no_leak = false;
  bool no_singletons = false;
  unsigned threads = 1;
};

/// "FA,MD,RD;FWW,STICK_AD,MD,RD"
std::vector<std::vector<Metric>> parse_combos(const std::string& text) {
  std::vector<std::vector<Metric>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_metric_list(item));
  }
  return out;
}

int run_classify(const ClassifyOptions& o) {
  require_file(o.table, "cohort table");
  const auto combos = o.combos.empty() ? classify::default_combos() : parse_combos(o.combos);
  const auto thresholds = parse_thresholds(o.thr);
  const regions::CohortTable table = regions::read_cohort_csv(o.table);
  echo_seed(o.seed);

  classify::SplitOptions options;
  options.n_splits = o.splits;
  options.train_frac = o.train_frac;
  options.seed = o.seed;
  options.ridge = o.ridge;
  options.no_leak = o.no_leak;
  options.threads = o.threads;
  const auto start = std::chrono::steady_clock::now();
  const auto results = classify::run_combinations(table, combos, thresholds, options, !o.no_singletons);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  io::CsvTable csv;
  csv.header = {"combo", "thr", "auc_mean", "auc_std", "n_pos", "n_neg"};
  std::size_t failed = 0;
  for (const auto& r : results) {
    csv.rows.push_back({classify::combo_name(r.combo), io::format_number(r.thr), io::format_number(r.auc_mean),
                        io::format_number(r.auc_std), std::to_string(r.n_pos), std::to_string(r.n_neg)});
    failed += r.error.empty() ? 0 : 1;
  }
  io::write_csv(csv, o.out);
  if (!o.svg.empty()) write_auc_svg(results, o.svg);

  std::vector<std::string> combo_names;
  for (const auto& c : combos) combo_names.push_back(classify::combo_name(c));
  write_sidecar(o.out, "classify",
                {{"table", o.table.string()},
                 {"combos", combo_names},
                 {"singletons", !o.no_singletons},
                 {"thresholds", thresholds},
                 {"splits", o.splits},
                 {"train_frac", o.train_frac},
                 {"ridge", o.ridge},
                 {"no_leak", o.no_leak},
                 {"failed_cells", failed}},
                &o.seed);
  std::printf("classify: %zu cells (%zu without enough rows), %zu splits each, %.2f s -> %s\n", results.size(), failed,
              o.splits, seconds, o.out.string().c_str());
  if (failed == results.size()) {
    std::fprintf(stderr, "error: no cell had enough rows of both classes\n");
    return kDegenerate;
  }
  return kOk;
}

}  // namespace

void add_classify_command(CLI::App& root, Action& action) {
  auto o = std::make_shared<ClassifyOptions>();
  CLI::App* sub = root.add_subcommand(
      "classify", "LDA + ROC AUC over repeated stratified train/test splits, per metric combo and threshold");
  sub->add_option("--table", o->table, "cohort CSV")->required();
  sub->add_option("--combos", o->combos, "metric combos, e.g. \"FA,MD,RD;FWW,STICK_AD,MD,RD\" (default: 8 combos)");
  sub->add_option("--thr", o->thr, "thresholds: start:stop:step or a comma list")->capture_default_str();
  sub->add_option("--splits", o->splits, "random splits per cell")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--seed", o->seed, "RNG seed")->required();
  sub->add_option("--out", o->out, "results CSV")->required();
  sub->add_option("--svg", o->svg, "AUC-vs-threshold plot");
  sub->add_option("--train-frac", o->train_frac, "training fraction per class")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--ridge", o->ridge, "ridge added to the pooled covariance")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_flag("--no-leak", o->no_leak, "fit the standardization on each training split only");
  sub->add_flag("--no-singletons", o->no_singletons, "skip the single-metric rows");
  add_threads_option(*sub, o->threads);
  sub->callback([o, &action] { action = [o] { return run_classify(*o); }; });
}

}  // namespace cordscan::cli
