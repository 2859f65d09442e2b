#include "cordscan/models/fit_volume.hpp"

#include <cmath>
#include <algorithm>
#include <optional>

#include "cordscan/error.hpp"
#include "cordscan/models/dti.hpp"
#include "cordscan/parallel.hpp"

namespace cordscan::models {

Model parse_model(const std::string& name) {
  if (name == "dti") return Model::Dti;
  if (name == "ballstick" || name == "ball-stick" || name == "bs") return Model::BallStick;
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + name + "' (expected dti or ballstick)");
}

std::string to_string(Model model) { return model == Model::Dti ? "dti" : "ballstick"; }

const io::Volume& VolumeFitResult::map(const std::string& name) const {
  for (const auto& m : maps) {
    if (m.name == name) return m.volume;
  }
  throw Error(ErrorCode::InvalidArgument, "no output map named '" + name + "'");
}

std::vector<std::string> output_names(Model model) {
  if (model == Model::Dti) return {"fa", "md", "ad", "rd", "rss", "flags"};
  return {"fa", "md", "ad", "rd", "fww", "stick_ad", "nx", "ny", "nz", "rss", "flags"};
}

VolumeFitResult fit_volume(const io::Volume& dwi, const io::GradientScheme& scheme, const io::Volume& mask,
                           const VolumeFitConfig& config) {
  const io::Geometry& geom = dwi.geometry();
  if (mask.geometry().dims != geom.dims) {
    throw Error(ErrorCode::DimensionMismatch, "mask grid does not match the DWI grid");
  }
  if (dwi.frames() != scheme.size()) {
    throw Error(ErrorCode::DimensionMismatch, "DWI has " + std::to_string(dwi.frames()) +
                                                  " frames but the gradient scheme has " +
                                                  std::to_string(scheme.size()) + " entries");
  }

  const auto names = output_names(config.model);
  VolumeFitResult result;
  for (const auto& name : names) result.maps.push_back({name, io::Volume(geom, 1, 0.0)});
  auto out = [&](std::size_t k) -> std::vector<double>& { return result.maps[k].volume.data(); };

  std::vector<std::size_t> voxels;
  for (std::size_t v = 0; v < geom.voxel_count(); ++v) {
    if (mask(v) != 0.0) voxels.push_back(v);
  }
  if (voxels.empty()) return result;

  const DtiFitter dti(scheme);
  std::optional<BallStickFitter> bs;
  if (config.model == Model::BallStick) bs.emplace(scheme, config.ballstick);

  const std::size_t rss_index = names.size() - 2;
  const std::size_t flag_index = names.size() - 1;
  std::vector<unsigned char> status(voxels.size(), 0);

  parallel_for(voxels.size(), config.threads, [&](std::size_t k) {
    const std::size_t v = voxels[k];
    Eigen::VectorXd signals;
    dwi.series(v, signals);
    unsigned flags = 0;
    if (!signals.allFinite()) {
      out(flag_index)[v] = kFlagFailed;
      status[k] = 2;
      return;
    }

    Attenuation att;
    try {
      att = normalize_attenuation(signals, scheme);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonPositiveS0) throw;
      out(flag_index)[v] = kFlagFailed;
      status[k] = 2;
      return;
    }

    const auto [tensor, tdiag] = dti.fit(att.normalized);
    const DtiMetrics m = dti_metrics(tensor);
    out(0)[v] = m.fa;
    out(1)[v] = m.md;
    out(2)[v] = m.ad;
    out(3)[v] = m.rd;

    if (!bs) {
      out(rss_index)[v] = tdiag.rss;
      flags |= tdiag.converged ? kFlagConverged : 0u;
    } else {
      BallStickParams init;
      init.d0 = bs->config().d0;
      init.lambda_perp = bs->config().lambda_perp;
      init.f = bs->config().initial_f;
      init.n = m.e1;
      init.d = std::clamp(m.ad, bs->config().d_min * 1.01, bs->config().d_max * 0.99);
      const auto [p, diag] = bs->fit(att.normalized, init);
      out(4)[v] = p.f;
      out(5)[v] = p.d;
      out(6)[v] = p.n.x();
      out(7)[v] = p.n.y();
      out(8)[v] = p.n.z();
      out(rss_index)[v] = diag.rss;
      flags |= diag.converged ? kFlagConverged : 0u;
      flags |= diag.degenerate ? kFlagDegenerate : 0u;
      if (diag.degenerate) status[k] = 1;
    }
    out(flag_index)[v] = flags;
  });

  result.fitted_voxels = voxels.size();
  for (unsigned char s : status) {
    result.degenerate_voxels += s == 1 ? 1 : 0;
    result.failed_voxels += s == 2 ? 1 : 0;
  }
  return result;
}

}  // namespace cordscan::models
