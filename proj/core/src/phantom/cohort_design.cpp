#include "cordscan/phantom/cohort_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "cordscan/error.hpp"

namespace cordscan::phantom {
namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

enum class LesionSize { None, Small, Medium, Large };

struct Band {
  double lo;  // fraction the lesion must exceed
  double hi;  // fraction it must not exceed
  double target_lo;
  double target_hi;
};

Band band_for(LesionSize size, const CohortDesign& d) {
  switch (size) {
    case LesionSize::Large:
      return {d.large_fraction, 1.0, 1.2 * d.large_fraction, 2.4 * d.large_fraction};
    case LesionSize::Medium:
      return {d.medium_fraction, d.large_fraction, d.medium_fraction + 0.2 * (d.large_fraction - d.medium_fraction),
              d.medium_fraction + 0.8 * (d.large_fraction - d.medium_fraction)};
    case LesionSize::Small:
    case LesionSize::None:
      break;
  }
  return {0.0, d.medium_fraction, 0.2 * d.medium_fraction, 0.8 * d.medium_fraction};
}

/// Normal quantiles at (i + 0.5) / n in a seeded random order. Drawing both
/// groups' subject effects from the same quantile set keeps their designed
/// means equal, so group differences come only from the injected effects.
std::vector<double> shuffled_quantiles(std::size_t n, std::uint64_t key) {
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    z[i] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * p - 1.0);
  }
  CounterRng rng(key);
  for (std::size_t i = n; i > 1; --i) std::swap(z[i - 1], z[rng.below(i)]);
  return z;
}

std::string subject_id(const char* prefix, std::size_t n) {
  std::string digits = std::to_string(n + 1);
  while (digits.size() < 3) digits.insert(digits.begin(), '0');
  return std::string(prefix) + digits;
}

}  // namespace

void CohortDesign::validate() const {
  if (large_rows + medium_rows + small_rows > patients * lesion_levels.size()) {
    invalid("more lesioned rows requested than patient rows available");
  }
  if (!(0.0 < medium_fraction && medium_fraction < large_fraction && large_fraction < 0.4)) {
    invalid("lesion fractions must satisfy 0 < medium < large < 0.4");
  }
  if (!(snr >= 0.0)) invalid("snr must be >= 0");
  for (int l : lesion_levels) {
    const bool present = std::any_of(base.levels.begin(), base.levels.end(), [&](const auto& r) { return r.label == l; });
    if (!present) invalid("lesion level " + std::to_string(l) + " is not in the base spec");
  }
  base.validate();
}

LesionSpec size_lesion(const PhantomSpec& spec, const LevelRange& level, std::size_t target_voxels,
                       std::size_t max_voxels, const TissueParams& params, CounterRng& rng) {
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double offset = 1.5 * rng.uniform();  // mm from the cord axis
  const Eigen::Vector2d c = spec.center();
  LesionSpec lesion;
  lesion.params = params;
  lesion.center = {c.x() + offset * std::cos(angle) / spec.voxel_size[0],
                   0.5 * static_cast<double>(level.begin + level.end - 1),
                   c.y() + offset * std::sin(angle) / spec.voxel_size[2]};

  const double max_in_plane = spec.cord_radius - offset;
  const double max_axial = 0.5 * static_cast<double>(level.end - level.begin) * spec.voxel_size[kCordAxis];
  const auto label = static_cast<std::size_t>(level.label);
  // Prefer lesions spanning most of the cross-section (so they reach the WM
  // annulus); shrink the in-plane radius only when the axial extent alone
  // cannot land close to the target count.
  const auto close_enough =
      std::min(max_voxels, static_cast<std::size_t>(std::ceil(1.15 * static_cast<double>(target_voxels))));
  std::size_t best = std::numeric_limits<std::size_t>::max();
  LesionSpec chosen = lesion;
  for (double r = max_in_plane; r >= 1.0; r -= 0.25) {
    for (double a = 0.5; a <= max_axial + 1e-12; a += 0.25) {
      lesion.radii = {r, a, r};
      const std::size_t n = lesion_footprint(spec, lesion)[label];
      if (n < target_voxels) continue;
      if (n < best) {
        best = n;
        chosen = lesion;
      }
      break;  // footprint only grows with the axial radius
    }
    if (best <= close_enough) break;
  }
  if (best > max_voxels) {
    invalid("level " + std::to_string(level.label) + " cannot hold a lesion of " + std::to_string(target_voxels) +
            " to " + std::to_string(max_voxels) + " voxels");
  }
  return chosen;
}

std::vector<SubjectDesign> design_cohort(const CohortDesign& design) {
  design.validate();
  const PhantomSpec& base = design.base;
  const auto level_voxels = level_voxel_counts(base);
  const double sigma = design.snr > 0.0 ? base.s0 / design.snr : 0.0;

  // Which (patient, lesion level) rows carry which lesion size.
  const std::size_t patient_rows = design.patients * design.lesion_levels.size();
  std::vector<LesionSize> sizes(patient_rows, LesionSize::None);
  {
    std::vector<std::size_t> order(patient_rows);
    for (std::size_t i = 0; i < patient_rows; ++i) order[i] = i;
    CounterRng rng(hash_combine(design.seed, hash_string("lesion-rows")));
    for (std::size_t i = patient_rows; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::size_t next = 0;
    for (std::size_t n = 0; n < design.large_rows; ++n) sizes[order[next++]] = LesionSize::Large;
    for (std::size_t n = 0; n < design.medium_rows; ++n) sizes[order[next++]] = LesionSize::Medium;
    for (std::size_t n = 0; n < design.small_rows; ++n) sizes[order[next++]] = LesionSize::Small;
  }

  const std::vector<double> healthy_zf = shuffled_quantiles(design.healthy, hash_combine(design.seed, hash_string("hf")));
  const std::vector<double> healthy_zd = shuffled_quantiles(design.healthy, hash_combine(design.seed, hash_string("hd")));
  const std::vector<double> patient_zf = shuffled_quantiles(design.patients, hash_combine(design.seed, hash_string("pf")));
  const std::vector<double> patient_zd = shuffled_quantiles(design.patients, hash_combine(design.seed, hash_string("pd")));

  std::vector<SubjectDesign> out;
  const std::size_t total = design.healthy + design.patients;
  for (std::size_t s = 0; s < total; ++s) {
    const bool patient = s >= design.healthy;
    const std::size_t p = s - (patient ? design.healthy : 0);
    SubjectDesign subject;
    subject.subject = patient ? subject_id("pat", p) : subject_id("hc", s);
    subject.group = patient ? regions::Group::Patient : regions::Group::Healthy;

    CounterRng rng(hash_combine(design.seed, s));
    PhantomSpec spec = base;
    spec.seed = hash_combine(hash_combine(design.seed, s), hash_string("noise"));
    spec.noise = {design.snr > 0.0 ? NoiseModel::Rician : NoiseModel::None, sigma};
    spec.lesions.clear();

    const double zf = patient ? patient_zf[p] : healthy_zf[s];
    const double zd = patient ? patient_zd[p] : healthy_zd[s];
    const double subject_f = design.healthy_params.f + design.subject_sd_f * zf;
    const double subject_d = design.healthy_params.d + design.subject_sd_d * zd;
    const double shift = patient ? design.nawm_f_shift : 0.0;
    for (auto& level : spec.levels) {
      const auto& offset = design.level_offset[static_cast<std::size_t>(level.label)];
      TissueParams t;
      t.f = std::clamp(subject_f + shift + offset.f + design.level_sd_f * rng.normal(), 0.0, 1.0);
      t.d = std::clamp(subject_d + offset.d + design.level_sd_d * rng.normal(), 1e-5, models::kStickMaxDiffusivity);
      level.tissue = t;
    }
    spec.wm = spec.levels.front().tissue.value();
    spec.gm = spec.wm;

    if (patient) {
      for (std::size_t li = 0; li < design.lesion_levels.size(); ++li) {
        const LesionSize size = sizes[p * design.lesion_levels.size() + li];
        if (size == LesionSize::None) continue;
        const int label = design.lesion_levels[li];
        const auto& level = *std::find_if(spec.levels.begin(), spec.levels.end(),
                                          [&](const auto& r) { return r.label == label; });
        const Band band = band_for(size, design);
        const double n = static_cast<double>(level_voxels[static_cast<std::size_t>(label)]);
        const double target = band.target_lo + (band.target_hi - band.target_lo) * rng.uniform();
        const auto voxels = static_cast<std::size_t>(std::max(1.0, std::ceil(target * n)));
        const auto most = static_cast<std::size_t>(std::floor(band.hi * n));
        LesionSpec lesion = size_lesion(spec, level, voxels, most, design.lesion_params, rng);
        const double fraction = static_cast<double>(lesion_footprint(spec, lesion)[static_cast<std::size_t>(label)]) / n;
        if (!(fraction > band.lo && fraction <= band.hi)) {
          invalid("could not size a lesion inside its fraction band for " + subject.subject + " (target " +
                  std::to_string(target) + ", got " + std::to_string(fraction) + ")");
        }
        spec.lesions.push_back(lesion);
      }
    }
    spec.validate();
    subject.spec = std::move(spec);
    out.push_back(std::move(subject));
  }
  return out;
}

}  // namespace cordscan::phantom
