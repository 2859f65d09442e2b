#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "cordscan/io/csv.hpp"
#include "cordscan/io/nifti.hpp"
#include "cordscan/io/scheme.hpp"
#include "cordscan/phantom/cohort_design.hpp"
#include "cordscan/phantom/phantom.hpp"
#include "cordscan/phantom/spec_json.hpp"

namespace cordscan::cli {
namespace {

namespace fs = std::filesystem;

struct PhantomOptions {
  fs::path spec;
  fs::path out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool cohort = false;
  std::size_t healthy = 25;
  std::size_t patients = 25;
  double snr = 20.0;
};

nlohmann::json count_json(const std::array<std::size_t, 8>& counts) {
  nlohmann::json j = nlohmann::json::object();
  for (int l = 1; l <= 7; ++l) {
    if (counts[static_cast<std::size_t>(l)] > 0) j["C" + std::to_string(l)] = counts[static_cast<std::size_t>(l)];
  }
  return j;
}

/// dwi, scheme, mask, label maps and truth maps of one subject.
void write_subject(const fs::path& dir, const phantom::PhantomSpec& spec, const phantom::PhantomOutput& p) {
  ensure_directory(dir);
  io::write_volume(p.dwi, dir / "dwi.nii.gz");
  io::write_scheme(p.scheme, dir / "bval", dir / "bvec");
  io::write_volume(p.mask, dir / "mask.nii.gz");
  io::write_volume(p.labels.levels, dir / "levels.nii.gz");
  io::write_volume(p.labels.wm_weight, dir / "wm.nii.gz");
  io::write_volume(p.labels.lesion ? *p.labels.lesion : io::Volume(p.mask.geometry(), 1), dir / "lesion.nii.gz");
  for (const auto& t : p.truth) io::write_volume(t.volume, dir / ("truth_" + t.name + ".nii.gz"));
  phantom::write_spec(spec, dir / "spec.json");
}

int run_single(const PhantomOptions& o) {
  phantom::PhantomSpec spec = o.spec.empty() ? phantom::PhantomSpec{} : phantom::read_spec(o.spec);
  spec.seed = o.seed;
  spec.validate();
  echo_seed(o.seed);
  const auto start = std::chrono::steady_clock::now();
  const phantom::PhantomOutput p = phantom::generate(spec, o.threads);
  write_subject(o.out, spec, p);
  write_sidecar(o.out, "phantom",
                {{"spec", nlohmann::json::parse(phantom::spec_to_json(spec))},
                 {"level_voxels", count_json(p.level_voxels)},
                 {"lesion_voxels", count_json(p.lesion_voxels)}},
                &o.seed);
  std::size_t cord = 0;
  for (double v : p.mask.data()) cord += v != 0.0;
  std::printf("phantom: %zu cord voxels, %zu frames -> %s (%.2f s)\n", cord, p.scheme.size(), o.out.string().c_str(),
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return kOk;
}

int run_cohort(const PhantomOptions& o) {
  phantom::CohortDesign design;
  if (!o.spec.empty()) design.base = phantom::read_spec(o.spec);
  design.seed = o.seed;
  design.healthy = o.healthy;
  design.patients = o.patients;
  design.snr = o.snr;
  // Scale the lesion row targets with the number of patient rows.
  if (o.patients != 25) {
    const double scale = static_cast<double>(o.patients) / 25.0;
    design.large_rows = static_cast<std::size_t>(std::floor(24.0 * scale));
    design.medium_rows = static_cast<std::size_t>(std::floor(12.0 * scale));
    design.small_rows = static_cast<std::size_t>(std::floor(15.0 * scale));
  }
  design.validate();
  echo_seed(o.seed);
  const auto start = std::chrono::steady_clock::now();
  ensure_directory(o.out);
  io::CsvTable index;
  index.header = {"subject", "group", "dir"};
  for (const auto& s : phantom::design_cohort(design)) {
    const phantom::PhantomOutput p = phantom::generate(s.spec, o.threads);
    write_subject(o.out / s.subject, s.spec, p);
    index.rows.push_back({s.subject, regions::to_string(s.group), s.subject});
  }
  io::write_csv(index, o.out / "subjects.csv");
  write_sidecar(o.out, "phantom --cohort",
                {{"healthy", design.healthy},
                 {"patients", design.patients},
                 {"snr", design.snr},
                 {"large_rows", design.large_rows},
                 {"medium_rows", design.medium_rows},
                 {"small_rows", design.small_rows},
                 {"base_spec", nlohmann::json::parse(phantom::spec_to_json(design.base))}},
                &o.seed);
  std::printf("phantom cohort: %zu subjects -> %s (%.2f s)\n", index.rows.size(), o.out.string().c_str(),
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return kOk;
}

}  // namespace

void add_phantom_command(CLI::App& root, Action& action) {
  auto o = std::make_shared<PhantomOptions>();
  CLI::App* sub = root.add_subcommand(
      "phantom", "Generate a synthetic cord dataset (dwi.nii.gz, bval, bvec, mask, levels, wm, lesion, truth_*)");
  sub->add_option("--spec", o->spec, "JSON phantom spec (defaults when omitted)")->check(CLI::ExistingFile);
  sub->add_option("--seed", o->seed, "RNG seed; overrides the spec's seed")->required();
  sub->add_option("--out", o->out, "output directory")->required();
  sub->add_flag("--cohort", o->cohort, "generate a healthy + patient cohort, one directory per subject");
  sub->add_option("--healthy", o->healthy, "cohort: healthy subjects")->capture_default_str();
  sub->add_option("--patients", o->patients, "cohort: patients")->capture_default_str();
  sub->add_option("--snr", o->snr, "cohort: s0 / sigma of the Rician noise (0 = noise-free)")->capture_default_str();
  add_threads_option(*sub, o->threads);
  sub->callback([o, &action] { action = [o] { return o->cohort ? run_cohort(*o) : run_single(*o); }; });
}

}  // namespace cordscan::cli
