#include "cordscan/models/ballstick.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "cordscan/error.hpp"
#include "cordscan/models/dti.hpp"

namespace cordscan::models {
namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

std::size_t distinct_axes(const io::GradientScheme& scheme) {
  std::vector<Eigen::Vector3d> axes;
  for (const auto& e : scheme.entries()) {
    if (e.b == 0.0) continue;
    const bool seen = std::any_of(axes.begin(), axes.end(),
                                  [&](const Eigen::Vector3d& a) { return std::fabs(a.dot(e.g)) > 1.0 - 1e-6; });
    if (!seen) axes.push_back(e.g);
  }
  return axes.size();
}

/// Orthonormal basis whose first column is n.
Eigen::Matrix3d frame_around(const Eigen::Vector3d& n) {
  const Eigen::Vector3d x = n.normalized();
  const Eigen::Vector3d helper = std::fabs(x.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d y = (helper - helper.dot(x) * x).normalized();
  const Eigen::Vector3d z = x.cross(y);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;
}

}  // namespace

Eigen::VectorXd predict_ballstick(const BallStickParams& p, const io::GradientScheme& scheme) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(scheme.size()));
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    const auto& e = scheme[i];
    if (e.b == 0.0) {
      s[static_cast<Eigen::Index>(i)] = 1.0;
      continue;
    }
    const double c = p.n.dot(e.g);
    const double stick = std::exp(-e.b * (p.lambda_perp + (p.d - p.lambda_perp) * c * c));
    const double ball = std::exp(-e.b * p.d0);
    s[static_cast<Eigen::Index>(i)] = (1.0 - p.f) * stick + p.f * ball;
  }
  return s;
}

Eigen::Vector3d direction_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

std::pair<double, double> angles_from_direction(const Eigen::Vector3d& n) {
  const Eigen::Vector3d u = n.normalized();
  return {std::acos(std::clamp(u.z(), -1.0, 1.0)), std::atan2(u.y(), u.x())};
}

Eigen::MatrixXd ballstick_jacobian(const BallStickParams& p, const io::GradientScheme& scheme) {
  const auto [theta, phi] = angles_from_direction(p.n);
  const Eigen::Vector3d n = direction_from_angles(theta, phi);
  const Eigen::Vector3d dn_dtheta(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta));
  const Eigen::Vector3d dn_dphi(-std::sin(theta) * std::sin(phi), std::sin(theta) * std::cos(phi), 0.0);

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(scheme.size()), 4);
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    const auto& e = scheme[i];
    if (e.b == 0.0) continue;
    const auto row = static_cast<Eigen::Index>(i);
    const double c = n.dot(e.g);
    const double stick = std::exp(-e.b * (p.lambda_perp + (p.d - p.lambda_perp) * c * c));
    const double ball = std::exp(-e.b * p.d0);
    const double dc = (1.0 - p.f) * stick * (-2.0 * e.b * (p.d - p.lambda_perp) * c);
    j(row, 0) = ball - stick;
    j(row, 1) = (1.0 - p.f) * stick * (-e.b * c * c);
    j(row, 2) = dc * e.g.dot(dn_dtheta);
    j(row, 3) = dc * e.g.dot(dn_dphi);
  }
  return j;
}

Eigen::Vector3d canonical_hemisphere(Eigen::Vector3d n) {
  if (n.z() < 0.0 || (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0)))) n = -n;
  return n;
}

double axis_angle_degrees(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double c = std::fabs(a.normalized().dot(b.normalized()));
  // acos is ill-conditioned near 1; use the cross product for small angles.
  const double s = a.normalized().cross(b.normalized()).norm();
  return std::atan2(s, c) * 180.0 / std::numbers::pi;
}

Attenuation normalize_attenuation(const Eigen::VectorXd& signals, const io::GradientScheme& scheme) {
  if (static_cast<std::size_t>(signals.size()) != scheme.size()) {
    throw Error(ErrorCode::DimensionMismatch, "signal length does not match the gradient scheme");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    if (scheme.is_b0(i)) {
      sum += signals[static_cast<Eigen::Index>(i)];
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::InvalidScheme, "no b = 0 measurement to normalize by");
  const double s0 = sum / static_cast<double>(count);
  if (!(s0 > 0.0)) throw Error(ErrorCode::NonPositiveS0, "mean b = 0 signal is not positive");
  return {signals / s0, s0};
}

struct BallStickFitter::Run {
  BallStickParams params;
  FitDiagnostics diag;
};

BallStickFitter::BallStickFitter(const io::GradientScheme& scheme, FitConfig config)
    : scheme_(scheme), config_(config) {
  if (distinct_axes(scheme) < 6) {
    throw Error(ErrorCode::InsufficientDirections, "Ball-and-Stick fit needs 6 non-collinear weighted directions");
  }
  if (!(config_.d_min > 0.0) || !(config_.d_max > config_.d_min)) {
    throw Error(ErrorCode::InvalidArgument, "stick diffusivity bounds must satisfy 0 < d_min < d_max");
  }
  const auto n = static_cast<Eigen::Index>(scheme.size());
  b_.resize(n);
  g_.resize(n, 3);
  ball_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = scheme[static_cast<std::size_t>(i)];
    b_[i] = e.b;
    g_.row(i) = e.g.transpose();
    ball_[i] = std::exp(-e.b * config_.d0);
  }
  try {
    tensor_fitter_ = std::make_shared<const DtiFitter>(scheme);
  } catch (const Error&) {
    tensor_fitter_.reset();
  }
}

BallStickParams BallStickFitter::initial_guess(const Eigen::Ref<const Eigen::VectorXd>& normalized) const {
  BallStickParams init;
  init.d0 = config_.d0;
  init.lambda_perp = config_.lambda_perp;
  init.f = config_.initial_f;
  bool have_tensor = false;
  if (tensor_fitter_) {
    const auto [tensor, diag] = tensor_fitter_->fit(normalized);
    if (diag.converged) {
      const DtiMetrics m = dti_metrics(tensor);
      if (m.e1.allFinite() && std::isfinite(m.ad)) {
        init.n = m.e1;
        init.d = m.ad;
        have_tensor = true;
      }
    }
  }
  if (!have_tensor) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < normalized.size(); ++i) {
      if (b_[i] == 0.0) continue;
      if (best < 0 || normalized[i] < normalized[best]) best = i;
    }
    init.n = best >= 0 ? Eigen::Vector3d(g_.row(best).transpose()) : Eigen::Vector3d::UnitZ();
    init.d = 1e-3;
  }
  init.d = std::clamp(init.d, config_.d_min * 1.01, config_.d_max * 0.99);
  return init;
}

BallStickFitter::Run BallStickFitter::run_lm(const Eigen::Ref<const Eigen::VectorXd>& y,
                                             const BallStickParams& init) const {
  const Eigen::Index n = y.size();
  const double log_dmin = std::log(config_.d_min);
  const double log_span = std::log(config_.d_max / config_.d_min);
  const double lp = config_.lambda_perp;
  const Eigen::Matrix3d frame = frame_around(init.n);

  struct State {
    double f, d, s;  // s = logistic(v) for the diffusivity map
    Eigen::Vector3d dir, dir_a, dir_b;
  };
  auto unpack = [&](const Eigen::Vector4d& x) {
    State st;
    st.f = logistic(x[0]);
    st.s = logistic(x[1]);
    st.d = std::exp(log_dmin + log_span * st.s);
    const double sa = std::sin(x[2]), ca = std::cos(x[2]), sb = std::sin(x[3]), cb = std::cos(x[3]);
    st.dir = frame * Eigen::Vector3d(sa * cb, sa * sb, ca);
    st.dir_a = frame * Eigen::Vector3d(ca * cb, ca * sb, -sa);
    st.dir_b = frame * Eigen::Vector3d(-sa * sb, sa * cb, 0.0);
    return st;
  };

  Eigen::VectorXd model(n), resid(n);
  auto evaluate = [&](const State& st, Eigen::Matrix<double, Eigen::Dynamic, 4>* jac) {
    const Eigen::VectorXd c = g_ * st.dir;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (b_[i] == 0.0) {
        model[i] = 1.0;
        if (jac) jac->row(i).setZero();
        continue;
      }
      const double ci = c[i];
      const double stick = std::exp(-b_[i] * (lp + (st.d - lp) * ci * ci));
      model[i] = (1.0 - st.f) * stick + st.f * ball_[i];
      if (jac) {
        const double w = (1.0 - st.f) * stick;
        const double dcoef = w * (-2.0 * b_[i] * (st.d - lp) * ci);
        (*jac)(i, 0) = (ball_[i] - stick) * st.f * (1.0 - st.f);
        (*jac)(i, 1) = w * (-b_[i] * ci * ci) * st.d * log_span * st.s * (1.0 - st.s);
        (*jac)(i, 2) = dcoef * g_.row(i).dot(st.dir_a);
        (*jac)(i, 3) = dcoef * g_.row(i).dot(st.dir_b);
      }
    }
    resid = model - y;
    return resid.squaredNorm();
  };

  const double f0 = std::clamp(init.f, 1e-4, 1.0 - 1e-4);
  const double d0 = std::clamp(init.d, config_.d_min * 1.0001, config_.d_max * 0.9999);
  Eigen::Vector4d x(logit(f0), logit((std::log(d0) - log_dmin) / log_span), std::numbers::pi / 2, 0.0);

  Eigen::Matrix<double, Eigen::Dynamic, 4> jac(n, 4);
  State st = unpack(x);
  double rss = evaluate(st, &jac);
  Eigen::VectorXd r = resid;

  Run run;
  run.diag.initial_rss = rss;
  const double rss_floor = static_cast<double>(n) * 1e-30;
  double lambda = 1e-3;
  int it = 0;
  bool converged = rss <= rss_floor;

  while (!converged && it < config_.max_iterations) {
    ++it;
    const Eigen::Matrix4d a = jac.transpose() * jac;
    const Eigen::Vector4d grad = jac.transpose() * r;
    const double diag_floor = std::max(1e-12 * a.diagonal().maxCoeff(), 1e-30);
    bool accepted = false;
    while (true) {
      Eigen::Matrix4d damped = a;
      for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(a(k, k), diag_floor);
      const Eigen::Vector4d step = damped.ldlt().solve(-grad);
      const Eigen::Vector4d trial = x + step;
      if (!step.allFinite()) {
        lambda *= 10.0;
      } else {
        const State trial_state = unpack(trial);
        const double trial_rss = evaluate(trial_state, nullptr);
        if (std::isfinite(trial_rss) && trial_rss < rss) {
          const double rel = (rss - trial_rss) / rss;
          x = trial;
          st = trial_state;
          rss = evaluate(st, &jac);
          r = resid;
          lambda = std::max(lambda * 0.1, 1e-12);
          accepted = true;
          if (rel < config_.relative_tolerance || rss <= rss_floor) converged = true;
          break;
        }
        lambda *= 10.0;
      }
      if (lambda > 1e16) {
        // No descent direction left at machine precision: a stationary point.
        converged = true;
        break;
      }
    }
    if (!accepted && converged) break;
  }

  run.params.f = st.f;
  run.params.d = st.d;
  run.params.n = canonical_hemisphere(st.dir.normalized());
  run.params.d0 = config_.d0;
  run.params.lambda_perp = lp;
  run.diag.rss = rss;
  run.diag.iterations = it;
  run.diag.converged = converged;
  return run;
}

std::pair<BallStickParams, FitDiagnostics> BallStickFitter::fit(
    const Eigen::Ref<const Eigen::VectorXd>& normalized) const {
  return fit(normalized, initial_guess(normalized));
}

std::pair<BallStickParams, FitDiagnostics> BallStickFitter::fit(const Eigen::Ref<const Eigen::VectorXd>& normalized,
                                                                const BallStickParams& init) const {
  if (static_cast<std::size_t>(normalized.size()) != scheme_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "signal length does not match the gradient scheme");
  }
  Run best = run_lm(normalized, init);
  const double initial_rss = best.diag.initial_rss;
  auto degenerate = [&](const BallStickParams& p) {
    return p.f > config_.degenerate_f || (p.d - p.lambda_perp) < config_.degenerate_margin;
  };
  // A stationary point that is degenerate or pinned to a diffusivity bound is usually a spurious basin.
  auto suspect = [&](const Run& r) {
    return !r.diag.converged || degenerate(r.params) || r.params.d < config_.d_min * 1.001 ||
           r.params.d > config_.d_max * 0.999;
  };
  for (int k = 1; k <= config_.restarts && suspect(best); ++k) {
    BallStickParams perturbed = init;
    perturbed.f = std::min(0.1 + 0.25 * k, 0.9);
    perturbed.d = init.d * (k % 2 == 1 ? 0.7 : 1.3);
    Run next = run_lm(normalized, perturbed);
    next.diag.iterations += best.diag.iterations;
    if (next.diag.rss < best.diag.rss) {
      best = next;
    } else {
      best.diag.iterations = next.diag.iterations;
    }
  }
  best.diag.initial_rss = initial_rss;
  const auto& p = best.params;
  best.diag.degenerate = degenerate(p);
  return {best.params, best.diag};
}

std::pair<BallStickParams, FitDiagnostics> fit_ballstick_voxel(const Eigen::VectorXd& normalized,
                                                               const io::GradientScheme& scheme,
                                                               const FitConfig& config) {
  return BallStickFitter(scheme, config).fit(normalized);
}

}  // namespace cordscan::models
