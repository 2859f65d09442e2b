#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cordscan/phantom/phantom.hpp"
#include "cordscan/regions/cohort.hpp"

namespace cordscan::phantom {

/// Recipe for a synthetic two-group cohort of phantom subjects.
///
/// Each subject gets its own WM/GM parameters around `healthy_params`, with
/// both groups drawing from the same set of normal quantiles; each level
/// adds a smaller jitter and `level_offset[label]` (in units of f and d).
/// Patients carry `nawm_f_shift` on top of that everywhere outside lesions,
/// and lesions in `lesion_levels` are sized so that exactly `large_rows`
/// patient rows exceed `large_fraction`, `medium_rows` more exceed
/// `medium_fraction`, and `small_rows` have small lesions below it.
struct CohortDesign {
  std::size_t healthy = 25;
  std::size_t patients = 25;
  std::uint64_t seed = 1;
  double snr = 20.0;  // s0 / sigma, Rician; 0 = noise-free

  TissueParams healthy_params{0.16, 1.14e-3};
  TissueParams lesion_params{0.21, 1.02e-3};
  double nawm_f_shift = 0.009;

  double subject_sd_f = 0.01;
  double subject_sd_d = 0.015e-3;
  double level_sd_f = 0.004;
  double level_sd_d = 0.012e-3;
  std::array<TissueParams, 8> level_offset{TissueParams{0, 0}, TissueParams{0, 0}, TissueParams{0, 0},
                                           TissueParams{0, 0}, TissueParams{0, 0}, TissueParams{0, 0},
                                           TissueParams{0, 0}, TissueParams{0, 0}};

  std::vector<int> lesion_levels{2, 3, 4};
  std::size_t large_rows = 24;
  std::size_t medium_rows = 12;
  std::size_t small_rows = 15;
  double large_fraction = 0.10;
  double medium_fraction = 0.05;

  PhantomSpec base{};

  /// Throws InvalidSpec when the row counts exceed the patient rows or the
  /// fractions are not ordered 0 < medium < large < 1.
  void validate() const;
};

struct SubjectDesign {
  std::string subject;
  regions::Group group = regions::Group::Healthy;
  PhantomSpec spec;
};

/// Deterministic in design.seed.
std::vector<SubjectDesign> design_cohort(const CohortDesign& design);

/// Lesion covering between `target_voxels` and `max_voxels` voxels of the
/// level slab and nothing outside it, as wide in-plane as that allows; the
/// in-plane offset comes from `rng`. Throws InvalidSpec when no lesion size
/// lands in the range.
LesionSpec size_lesion(const PhantomSpec& spec, const LevelRange& level, std::size_t target_voxels,
                       std::size_t max_voxels, const TissueParams& params, CounterRng& rng);

}  // namespace cordscan::phantom
