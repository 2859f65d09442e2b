#include "cordscan/phantom/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "cordscan/error.hpp"
#include "cordscan/models/dti.hpp"
#include "cordscan/parallel.hpp"
#include "cordscan/phantom/directions.hpp"

namespace cordscan::phantom {
namespace {

constexpr int kSub = 3;  // subvoxel samples per axis for partial volume

struct VoxelLayout {
  int label = 0;
  double wm_weight = 0.0;
  Tissue tissue = Tissue::Background;
  const TissueParams* params = nullptr;
};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

const LevelRange* level_at(const PhantomSpec& spec, std::size_t j) {
  for (const auto& l : spec.levels) {
    if (j >= l.begin && j < l.end) return &l;
  }
  return nullptr;
}

/// In-plane radial distance (mm) from the cord axis of a point in voxel coordinates.
double radius_mm(const PhantomSpec& spec, double i, double k) {
  const Eigen::Vector2d c = spec.center();
  const double di = (i - c.x()) * spec.voxel_size[0];
  const double dk = (k - c.y()) * spec.voxel_size[2];
  return std::hypot(di, dk);
}

bool inside(const LesionSpec& lesion, const PhantomSpec& spec, const Eigen::Vector3d& p) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - lesion.center[a]) * spec.voxel_size[static_cast<std::size_t>(a)] / lesion.radii[a];
    s += u * u;
  }
  return s <= 1.0;
}

VoxelLayout layout_voxel(const PhantomSpec& spec, std::size_t i, std::size_t j, std::size_t k) {
  VoxelLayout v;
  const LevelRange* level = level_at(spec, j);
  if (!level) return v;
  v.label = level->label;
  int in_cord = 0;
  int in_wm = 0;
  for (int a = 0; a < kSub; ++a) {
    for (int c = 0; c < kSub; ++c) {
      const double r = radius_mm(spec, static_cast<double>(i) + (a - 1) / 3.0, static_cast<double>(k) + (c - 1) / 3.0);
      if (r <= spec.cord_radius) {
        ++in_cord;
        if (r >= spec.wm_inner_radius) ++in_wm;
      }
    }
  }
  if (in_cord == 0) {
    v.label = 0;
    return v;
  }
  // The cord is straight along axis 1, so subvoxel samples along that axis
  // all agree and a 3x3 cross-section gives the 3x3x3 fraction.
  v.wm_weight = static_cast<double>(in_wm) / (kSub * kSub);
  const double rc = radius_mm(spec, static_cast<double>(i), static_cast<double>(k));
  if (rc < spec.wm_inner_radius) {
    v.tissue = Tissue::GrayMatter;
    v.params = level->tissue ? &*level->tissue : &spec.gm;
  } else {
    v.tissue = Tissue::WhiteMatter;
    v.params = level->tissue ? &*level->tissue : &spec.wm;
  }
  const Eigen::Vector3d p(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
  for (const auto& lesion : spec.lesions) {
    if (inside(lesion, spec, p)) {
      v.tissue = Tissue::Lesion;
      v.params = &lesion.params;
      break;
    }
  }
  return v;
}

void check_tissue(const TissueParams& t, const PhantomSpec& spec, const std::string& name) {
  if (!(t.f >= 0.0 && t.f <= 1.0)) invalid(name + ".f must lie in [0, 1]");
  if (!(t.d > 0.0 && t.d <= models::kStickMaxDiffusivity)) invalid(name + ".d must lie in (0, 4e-3]");
  if (!(spec.lambda_perp >= 0.0)) invalid("lambda_perp must be >= 0");
}

}  // namespace

NoiseModel parse_noise_model(const std::string& name) {
  if (name == "none") return NoiseModel::None;
  if (name == "gaussian") return NoiseModel::Gaussian;
  if (name == "rician") return NoiseModel::Rician;
  invalid("unknown noise model '" + name + "' (none, gaussian, rician)");
}

std::string to_string(NoiseModel model) {
  switch (model) {
    case NoiseModel::None: return "none";
    case NoiseModel::Gaussian: return "gaussian";
    case NoiseModel::Rician: return "rician";
  }
  return "none";
}

std::vector<LevelRange> PhantomSpec::default_levels() {
  std::vector<LevelRange> levels;
  for (int l = 1; l <= 7; ++l) {
    const auto begin = static_cast<std::size_t>(5 + 10 * (l - 1));
    levels.push_back({l, begin, begin + 10, std::nullopt});
  }
  return levels;
}

Eigen::Vector2d PhantomSpec::center() const {
  return {(static_cast<double>(dims[0]) - 1.0) / 2.0, (static_cast<double>(dims[2]) - 1.0) / 2.0};
}

void PhantomSpec::validate() const {
  for (std::size_t a = 0; a < 3; ++a) {
    if (dims[a] == 0) invalid("dims must be positive");
    if (!(voxel_size[a] > 0.0)) invalid("voxel_size must be positive");
  }
  if (!(cord_radius > 0.0)) invalid("cord_radius must be positive");
  if (!(wm_inner_radius >= 0.0 && wm_inner_radius < cord_radius)) {
    invalid("wm_inner_radius must lie in [0, cord_radius)");
  }
  const Eigen::Vector2d c = center();
  if (c.x() * voxel_size[0] + 0.5 * voxel_size[0] < cord_radius ||
      c.y() * voxel_size[2] + 0.5 * voxel_size[2] < cord_radius) {
    invalid("cord cross-section does not fit in the grid");
  }
  if (levels.empty()) invalid("levels must not be empty");
  std::vector<LevelRange> sorted = levels;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
  std::set<int> labels;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& l = sorted[i];
    if (l.label < io::kMinLevel || l.label > io::kMaxLevel) invalid("level label must lie in 1..7");
    if (!labels.insert(l.label).second) invalid("level label " + std::to_string(l.label) + " repeated");
    if (l.end <= l.begin || l.end > dims[kCordAxis]) invalid("level range outside the grid or empty");
    if (i > 0 && sorted[i - 1].end != l.begin) invalid("level ranges must be contiguous and non-overlapping");
    if (l.tissue) check_tissue(*l.tissue, *this, "level " + std::to_string(l.label));
  }
  check_tissue(wm, *this, "wm");
  check_tissue(gm, *this, "gm");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) invalid("noise sigma must be >= 0");
  if (!(s0 > 0.0)) invalid("s0 must be positive");
  if (!(d0 > 0.0)) invalid("d0 must be positive");
  if (!(b > 0.0)) invalid("b must be positive");
  if (b0_count == 0 || repeats == 0) invalid("scheme needs b0 entries and at least one repeat");

  const double cord_begin = static_cast<double>(sorted.front().begin) - 0.5;
  const double cord_end = static_cast<double>(sorted.back().end) - 0.5;
  for (std::size_t n = 0; n < lesions.size(); ++n) {
    const auto& lesion = lesions[n];
    const std::string name = "lesion " + std::to_string(n);
    check_tissue(lesion.params, *this, name);
    if (!(lesion.radii.minCoeff() > 0.0)) invalid(name + " radii must be positive");
    const double r = radius_mm(*this, lesion.center.x(), lesion.center.z());
    if (r + std::max(lesion.radii.x(), lesion.radii.z()) > cord_radius + 1e-9) invalid(name + " extends outside the cord");
    const double half = lesion.radii.y() / voxel_size[kCordAxis];
    if (lesion.center.y() - half < cord_begin || lesion.center.y() + half > cord_end) {
      invalid(name + " extends beyond the labeled levels");
    }
  }
}

const io::Volume& PhantomOutput::truth_map(const std::string& name) const {
  for (const auto& t : truth) {
    if (t.name == name) return t.volume;
  }
  throw Error(ErrorCode::InvalidArgument, "no truth map named '" + name + "'");
}

double add_noise(double signal, const NoiseSpec& noise, CounterRng& rng) {
  if (noise.model == NoiseModel::None || noise.sigma == 0.0) return signal;
  if (noise.model == NoiseModel::Gaussian) return signal + noise.sigma * rng.normal();
  const double re = signal + noise.sigma * rng.normal();
  const double im = noise.sigma * rng.normal();
  return std::hypot(re, im);
}

std::array<std::size_t, 8> level_voxel_counts(const PhantomSpec& spec) {
  std::array<std::size_t, 8> counts{};
  for (const auto& level : spec.levels) {
    for (std::size_t k = 0; k < spec.dims[2]; ++k) {
      for (std::size_t j = level.begin; j < level.end; ++j) {
        for (std::size_t i = 0; i < spec.dims[0]; ++i) {
          const VoxelLayout v = layout_voxel(spec, i, j, k);
          if (v.label != 0) ++counts[static_cast<std::size_t>(v.label)];
        }
      }
    }
  }
  return counts;
}

std::array<std::size_t, 8> lesion_footprint(const PhantomSpec& spec, const LesionSpec& lesion) {
  PhantomSpec single = spec;
  single.lesions = {lesion};
  std::array<std::size_t, 8> counts{};
  std::array<std::size_t, 3> lo{}, hi{};
  for (std::size_t a = 0; a < 3; ++a) {
    const auto ai = static_cast<Eigen::Index>(a);
    const double half = lesion.radii[ai] / spec.voxel_size[a];
    lo[a] = static_cast<std::size_t>(std::clamp(std::floor(lesion.center[ai] - half), 0.0, double(spec.dims[a])));
    hi[a] = static_cast<std::size_t>(std::clamp(std::ceil(lesion.center[ai] + half) + 1.0, 0.0, double(spec.dims[a])));
  }
  for (std::size_t k = lo[2]; k < hi[2]; ++k) {
    for (std::size_t j = lo[1]; j < hi[1]; ++j) {
      for (std::size_t i = lo[0]; i < hi[0]; ++i) {
        const VoxelLayout v = layout_voxel(single, i, j, k);
        if (v.tissue == Tissue::Lesion) ++counts[static_cast<std::size_t>(v.label)];
      }
    }
  }
  return counts;
}

PhantomOutput generate(const PhantomSpec& spec, unsigned threads) {
  spec.validate();
  const io::Geometry geometry = io::make_geometry(spec.dims, spec.voxel_size);
  const std::size_t nvox = geometry.voxel_count();

  PhantomOutput out;
  out.scheme = default_scheme(spec.b, spec.b0_count, spec.repeats);
  const std::size_t nmeas = out.scheme.size();
  out.dwi = io::Volume(geometry, nmeas, 0.0);
  out.dwi.set_4d(true);
  out.labels.levels = io::Volume(geometry, 1, 0.0);
  out.labels.wm_weight = io::Volume(geometry, 1, 0.0);
  out.labels.lesion = io::Volume(geometry, 1, 0.0);
  out.mask = io::Volume(geometry, 1, 0.0);

  const std::vector<std::string> truth_names = {"fww", "stick_ad", "nx", "ny", "nz", "fa", "md", "ad", "rd", "tissue"};
  std::vector<io::Volume> truth(truth_names.size(), io::Volume(geometry, 1, 0.0));

  std::vector<VoxelLayout> layout(nvox);
  for (std::size_t v = 0; v < nvox; ++v) {
    const auto [i, j, k] = geometry.coords(v);
    layout[v] = layout_voxel(spec, i, j, k);
  }

  // Noise-free attenuation and DTI truth depend only on the tissue parameters.
  const Eigen::Vector3d axis = Eigen::Vector3d::UnitY();
  const models::DtiFitter dti(out.scheme);
  std::map<const TissueParams*, std::pair<Eigen::VectorXd, models::DtiMetrics>> per_tissue;
  for (const auto& v : layout) {
    if (!v.params || per_tissue.count(v.params)) continue;
    models::BallStickParams p{v.params->f, v.params->d, axis, spec.d0, spec.lambda_perp};
    Eigen::VectorXd attenuation = models::predict_ballstick(p, out.scheme);
    const auto [tensor, diag] = dti.fit(attenuation);
    per_tissue.emplace(v.params, std::make_pair(std::move(attenuation), models::dti_metrics(tensor)));
  }

  parallel_for(nvox, threads, [&](std::size_t v) {
    const VoxelLayout& lay = layout[v];
    const Eigen::VectorXd* attenuation = nullptr;
    if (lay.params) {
      const auto& [att, metrics] = per_tissue.at(lay.params);
      attenuation = &att;
      out.labels.levels(v) = lay.label;
      out.labels.wm_weight(v) = lay.wm_weight;
      out.labels.lesion.value()(v) = lay.tissue == Tissue::Lesion ? 1.0 : 0.0;
      out.mask(v) = 1.0;
      const double values[] = {lay.params->f, lay.params->d, axis.x(), axis.y(), axis.z(),
                               metrics.fa,    metrics.md,    metrics.ad, metrics.rd, static_cast<double>(lay.tissue)};
      for (std::size_t m = 0; m < truth.size(); ++m) truth[m](v) = values[m];
    }
    if (!attenuation) return;  // background stays exactly zero
    const std::uint64_t key = hash_combine(spec.seed, v);
    for (std::size_t t = 0; t < nmeas; ++t) {
      CounterRng rng(key, 2 * t);
      out.dwi(v, t) = add_noise(spec.s0 * (*attenuation)[static_cast<Eigen::Index>(t)], spec.noise, rng);
    }
  }, 256);

  for (std::size_t v = 0; v < nvox; ++v) {
    const auto label = static_cast<std::size_t>(layout[v].label);
    if (label == 0) continue;
    ++out.level_voxels[label];
    if (layout[v].tissue == Tissue::Lesion) ++out.lesion_voxels[label];
  }
  for (std::size_t m = 0; m < truth.size(); ++m) out.truth.push_back({truth_names[m], std::move(truth[m])});
  return out;
}

}  // namespace cordscan::phantom
