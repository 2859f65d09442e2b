#pragma once

#include <filesystem>
#include <optional>

#include "cordscan/io/volume.hpp"

namespace cordscan::io {

inline constexpr int kMinLevel = 1;  // C1
inline constexpr int kMaxLevel = 7;  // C7

/// Vertebral-level atlas resampled to a subject's diffusion grid.
struct LabelMap {
  Volume levels;                 // 0 = background, 1..7 = C1..C7
  Volume wm_weight;              // white-matter partial-volume weight in [0, 1]
  std::optional<Volume> lesion;  // non-zero = lesion

  /// Throws DimensionMismatch if the maps are not 3D on one grid, and
  /// InvalidArgument for a level label outside 0..7 or a weight outside [0, 1].
  void validate() const;

  /// Throws DimensionMismatch unless `geometry` equals the label grid.
  void require_grid(const Geometry& geometry) const;
};

/// Reads and validates the label volumes; lesion_path may be empty.
LabelMap read_label_map(const std::filesystem::path& levels_path, const std::filesystem::path& wm_path,
                        const std::filesystem::path& lesion_path = {});

}  // namespace cordscan::io
