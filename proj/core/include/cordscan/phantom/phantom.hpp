#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cordscan/io/labels.hpp"
#include "cordscan/io/scheme.hpp"
#include "cordscan/io/volume.hpp"
#include "cordscan/models/ballstick.hpp"
#include "cordscan/models/fit_volume.hpp"
#include "cordscan/rng.hpp"

namespace cordscan::phantom {

enum class NoiseModel { None, Gaussian, Rician };

NoiseModel parse_noise_model(const std::string& name);
std::string to_string(NoiseModel model);

struct NoiseSpec {
  NoiseModel model = NoiseModel::None;
  double sigma = 0.0;  // same units as s0
};

/// Ball-and-Stick truth for one tissue class; the stick follows the cord axis.
struct TissueParams {
  double f = 0.16;
  double d = 1.14e-3;  // mm^2/s
};

/// Slab of the cord, [begin, end) in voxel indices along the cord axis.
/// `tissue`, when set, replaces both the WM and GM parameters in the slab.
struct LevelRange {
  int label = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<TissueParams> tissue;
};

struct LesionSpec {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // voxel coordinates
  Eigen::Vector3d radii = Eigen::Vector3d::Ones();   // mm, along the grid axes
  TissueParams params{0.21, 1.02e-3};
};

/// Straight cylindrical cord running along grid axis 1 (the long in-plane
/// axis of a sagittal acquisition), centered in the (0, 2) cross-section.
/// Gray matter fills the core (radius < wm_inner_radius); the annulus out to
/// cord_radius is white matter.
struct PhantomSpec {
  std::array<std::size_t, 3> dims{80, 80, 16};
  std::array<double, 3> voxel_size{2.0, 2.0, 2.0};
  double cord_radius = 6.0;      // mm
  double wm_inner_radius = 2.5;  // mm
  std::vector<LevelRange> levels = default_levels();
  TissueParams wm{};
  TissueParams gm{};
  std::vector<LesionSpec> lesions;
  NoiseSpec noise;
  double s0 = 1000.0;
  double d0 = models::kFreeWaterDiffusivity;
  double lambda_perp = models::kStickRadialDiffusivity;
  double b = 900.0;
  std::size_t b0_count = 6;
  std::size_t repeats = 3;
  std::uint64_t seed = 0;

  /// C1..C7 as consecutive 10-voxel slabs starting at index 5.
  static std::vector<LevelRange> default_levels();

  /// Cross-section center in voxel coordinates (axes 0 and 2).
  Eigen::Vector2d center() const;

  /// Throws InvalidSpec with the offending field named.
  void validate() const;
};

inline constexpr int kCordAxis = 1;

/// Named per-voxel ground-truth maps: fww, stick_ad, nx, ny, nz (generating
/// parameters), fa, md, ad, rd (DTI of the noise-free signal), tissue
/// (0 background, 1 WM, 2 GM, 3 lesion).
struct PhantomOutput {
  io::Volume dwi;
  io::GradientScheme scheme;
  io::LabelMap labels;
  io::Volume mask;  // cord voxels
  std::vector<models::NamedVolume> truth;
  std::array<std::size_t, 8> level_voxels{};   // indexed by label
  std::array<std::size_t, 8> lesion_voxels{};  // indexed by label

  const io::Volume& truth_map(const std::string& name) const;
};

enum class Tissue { Background = 0, WhiteMatter = 1, GrayMatter = 2, Lesion = 3 };

/// S + N(0, sigma) (gaussian) or |S + N1 + i N2| (rician); identity for
/// sigma = 0 or NoiseModel::None.
double add_noise(double signal, const NoiseSpec& noise, CounterRng& rng);

/// Deterministic in spec.seed. Background voxels are exactly zero; noise is
/// added to cord voxels only, with the draws for voxel v, measurement t taken
/// from the stream keyed by (seed, v, t), independent of thread count.
PhantomOutput generate(const PhantomSpec& spec, unsigned threads = 1);

/// Cord voxels per level label, before lesions.
std::array<std::size_t, 8> level_voxel_counts(const PhantomSpec& spec);

/// Lesion voxels the spec would produce for one lesion, by level label.
std::array<std::size_t, 8> lesion_footprint(const PhantomSpec& spec, const LesionSpec& lesion);

}  // namespace cordscan::phantom
