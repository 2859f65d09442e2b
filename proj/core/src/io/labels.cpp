#include "cordscan/io/labels.hpp"

#include <cmath>
#include <string>

#include "cordscan/error.hpp"
#include "cordscan/io/nifti.hpp"

namespace cordscan::io {
namespace {

// Grids written by different tools may disagree in the last float32 bits of
// the affine; compare dims exactly and the affine to a small tolerance.
bool same_grid(const Geometry& a, const Geometry& b) {
  return a.dims == b.dims && (a.affine - b.affine).cwiseAbs().maxCoeff() <= 1e-4;
}

}  // namespace

void LabelMap::validate() const {
  if (levels.frames() != 1 || wm_weight.frames() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "level and WM maps must be 3D");
  }
  if (!same_grid(levels.geometry(), wm_weight.geometry())) {
    throw Error(ErrorCode::DimensionMismatch, "level and WM maps are on different grids");
  }
  if (lesion && (lesion->frames() != 1 || !same_grid(levels.geometry(), lesion->geometry()))) {
    throw Error(ErrorCode::DimensionMismatch, "lesion mask is not on the level-map grid");
  }
  for (std::size_t i = 0; i < levels.voxel_count(); ++i) {
    const double l = levels(i);
    if (l != std::round(l) || l < 0 || l > kMaxLevel) {
      throw Error(ErrorCode::InvalidArgument, "level label " + std::to_string(l) + " outside 0..7");
    }
    const double w = wm_weight(i);
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "WM weight " + std::to_string(w) + " outside [0, 1]");
    }
  }
}

void LabelMap::require_grid(const Geometry& geometry) const {
  if (!same_grid(levels.geometry(), geometry)) {
    throw Error(ErrorCode::DimensionMismatch, "metric map grid differs from the label grid");
  }
}

LabelMap read_label_map(const std::filesystem::path& levels_path, const std::filesystem::path& wm_path,
                        const std::filesystem::path& lesion_path) {
  LabelMap labels{read_volume(levels_path), read_volume(wm_path), std::nullopt};
  if (!lesion_path.empty()) labels.lesion = read_volume(lesion_path);
  labels.validate();
  return labels;
}

}  // namespace cordscan::io
