#pragma once

#include <string>
#include <vector>

#include "cordscan/io/scheme.hpp"
#include "cordscan/io/volume.hpp"
#include "cordscan/models/ballstick.hpp"

namespace cordscan::models {

enum class Model { Dti, BallStick };

Model parse_model(const std::string& name);
std::string to_string(Model model);

/// Bits of the "flags" output map.
enum FitFlag : unsigned {
  kFlagConverged = 1u << 0,
  kFlagDegenerate = 1u << 1,
  kFlagFailed = 1u << 2,  // non-positive s0 or non-finite signal
};

struct VolumeFitConfig {
  Model model = Model::BallStick;
  FitConfig ballstick;
  unsigned threads = 0;  // 0 = all available cores
};

struct NamedVolume {
  std::string name;
  io::Volume volume;
};

struct VolumeFitResult {
  std::vector<NamedVolume> maps;
  std::size_t fitted_voxels = 0;
  std::size_t degenerate_voxels = 0;
  std::size_t failed_voxels = 0;

  const io::Volume& map(const std::string& name) const;
};

/// Output map names in emission order: fa, md, ad, rd for both models;
/// Ball-and-Stick adds fww, stick_ad, nx, ny, nz; both end with rss, flags.
std::vector<std::string> output_names(Model model);

/// Fits every voxel with a non-zero mask value. Voxels outside the mask are
/// zero in every output. Each voxel writes only its own outputs, so the
/// result is bitwise identical for any thread count.
///
/// Throws DimensionMismatch when the mask grid differs from the DWI grid or
/// the scheme length differs from the number of DWI frames.
VolumeFitResult fit_volume(const io::Volume& dwi, const io::GradientScheme& scheme, const io::Volume& mask,
                           const VolumeFitConfig& config);

}  // namespace cordscan::models
