#include <chrono>
#include <cstdio>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "cordscan/io/nifti.hpp"
#include "cordscan/io/scheme.hpp"
#include "cordscan/models/fit_volume.hpp"

namespace cordscan::cli {
namespace {

namespace fs = std::filesystem;

struct FitOptions {
  fs::path dwi;
  fs::path bval;
  fs::path bvec;
  fs::path mask;
  fs::path out;
  std::string model = "ballstick";
  double lambda_perp = models::kStickRadialDiffusivity;
  double d0 = models::kFreeWaterDiffusivity;
  unsigned threads = 1;
};

int run_fit(const FitOptions& o) {
  require_file(o.dwi, "DWI");
  require_file(o.bval, "bval file");
  require_file(o.bvec, "bvec file");
  require_file(o.mask, "mask");
  models::VolumeFitConfig config;
  config.model = models::parse_model(o.model);
  config.ballstick.lambda_perp = o.lambda_perp;
  config.ballstick.d0 = o.d0;
  config.threads = o.threads;

  const io::GradientScheme scheme = io::read_scheme(o.bval, o.bvec);
  const io::Volume dwi = io::read_volume(o.dwi);
  const io::Volume mask = io::read_volume(o.mask);
  ensure_directory(o.out);

  const auto start = std::chrono::steady_clock::now();
  const models::VolumeFitResult r = models::fit_volume(dwi, scheme, mask, config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& m : r.maps) io::write_volume(m.volume, o.out / (m.name + ".nii.gz"));
  write_sidecar(o.out, "fit",
                {{"model", models::to_string(config.model)},
                 {"lambda_perp", o.lambda_perp},
                 {"d0", o.d0},
                 {"dwi", o.dwi.string()},
                 {"mask", o.mask.string()},
                 {"fitted_voxels", r.fitted_voxels},
                 {"degenerate_voxels", r.degenerate_voxels},
                 {"failed_voxels", r.failed_voxels}});
  std::printf("fit %s: %zu voxels (%zu degenerate, %zu failed) in %.2f s -> %s\n",
              models::to_string(config.model).c_str(), r.fitted_voxels, r.degenerate_voxels, r.failed_voxels, seconds,
              o.out.string().c_str());
  if (r.fitted_voxels == r.failed_voxels) {
    std::fprintf(stderr, "error: no voxel could be fitted (empty mask or non-positive b0 signal)\n");
    return kDegenerate;
  }
  return kOk;
}

}  // namespace

void add_fit_command(CLI::App& root, Action& action) {
  auto o = std::make_shared<FitOptions>();
  CLI::App* sub = root.add_subcommand("fit", "Fit DTI or Ball-and-Stick voxel-wise inside a mask");
  sub->add_option("--dwi", o->dwi, "4D diffusion-weighted NIfTI")->required();
  sub->add_option("--bval", o->bval, "FSL b-value file")->required();
  sub->add_option("--bvec", o->bvec, "FSL gradient direction file")->required();
  sub->add_option("--mask", o->mask, "3D mask; voxels with non-zero values are fitted")->required();
  sub->add_option("--out", o->out, "output directory for the metric maps")->required();
  sub->add_option("--model", o->model, "ballstick or dti")
      ->check(CLI::IsMember({"ballstick", "dti"}, CLI::ignore_case))
      ->capture_default_str();
  sub->add_option("--lambda-perp", o->lambda_perp, "stick radial diffusivity, mm^2/s (0 = plain stick)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--d0", o->d0, "free water diffusivity, mm^2/s")->check(CLI::PositiveNumber)->capture_default_str();
  add_threads_option(*sub, o->threads);
  sub->callback([o, &action] { action = [o] { return run_fit(*o); }; });
}

}  // namespace cordscan::cli
