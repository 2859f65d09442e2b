#pragma once

#include <filesystem>
#include <vector>

#include "cordscan/classify/repeated_split.hpp"

namespace cordscan::cli {

/// AUC against lesion-fraction threshold, one curve per combo with a
/// mean +- std band. Cells with NaN AUC are left out of their curve.
void write_auc_svg(const std::vector<classify::RocSummary>& results, const std::filesystem::path& path);

}  // namespace cordscan::cli
