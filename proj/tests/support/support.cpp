#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cordscan/models/fit_volume.hpp"
#include "cordscan/rng.hpp"

namespace cordscan::testing {

std::filesystem::path oracle_path(const std::string& name) { return std::filesystem::path(CORDSCAN_ORACLE_DIR) / name; }

std::vector<std::vector<std::string>> read_oracle(const std::string& name) {
  std::ifstream in(oracle_path(name));
  if (!in) throw std::runtime_error("cannot open oracle " + name);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

double number(const std::string& field) { return std::strtod(field.c_str(), nullptr); }

std::vector<double> numbers(const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(field);
  std::string token;
  while (ss >> token) out.push_back(number(token));
  return out;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  const auto stamp = static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count());
  path_ = std::filesystem::temp_directory_path() /
          ("cordscan-test-" + std::to_string(hash_combine(stamp, counter++) % 1000000007ULL));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

regions::CohortTable simulate_cohort(const phantom::CohortDesign& design, const std::vector<int>& levels,
                                     unsigned threads) {
  const std::set<int> wanted(levels.begin(), levels.end());
  std::vector<regions::SubjectRecord> records;
  for (const auto& subject : phantom::design_cohort(design)) {
    const auto out = phantom::generate(subject.spec, threads);
    io::Volume mask = out.mask;
    for (std::size_t v = 0; v < mask.voxel_count(); ++v) {
      if (!wanted.count(static_cast<int>(out.labels.levels(v)))) mask(v) = 0.0;
    }
    models::VolumeFitConfig config;
    config.threads = threads;
    const auto fit = models::fit_volume(out.dwi, out.scheme, mask, config);
    regions::MetricMaps maps{};
    for (Metric m : kAllMetrics) maps[index(m)] = &fit.map(std::string(column_name(m)));
    records.push_back({subject.subject, subject.group,
                       regions::summarize_subject(subject.subject, maps, out.labels, levels)});
  }
  return regions::build_cohort(records, levels);
}

}  // namespace cordscan::testing
