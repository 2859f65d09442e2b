#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cordscan/phantom/cohort_design.hpp"
#include "cordscan/regions/cohort.hpp"

namespace cordscan::testing {

/// Frozen reference tables under tests/oracles.
std::filesystem::path oracle_path(const std::string& name);

/// Header-less rows of a comma-separated oracle file.
std::vector<std::vector<std::string>> read_oracle(const std::string& name);

/// strtod, so values below the double range parse as 0 instead of throwing;
/// "inf" is accepted.
double number(const std::string& field);

/// Whitespace-separated numbers.
std::vector<double> numbers(const std::string& field);

/// Fresh directory removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// Phantom -> Ball-and-Stick/DTI fit -> per-level aggregation for every
/// subject of the design, in memory. Only voxels of the requested levels
/// are fitted.
regions::CohortTable simulate_cohort(const phantom::CohortDesign& design, const std::vector<int>& levels,
                                     unsigned threads = 1);

}  // namespace cordscan::testing
