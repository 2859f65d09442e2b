#pragma once

#include <memory>
#include <utility>

#include <Eigen/Core>

#include "cordscan/io/scheme.hpp"
#include "cordscan/models/diagnostics.hpp"

namespace cordscan::models {

class DtiFitter;

inline constexpr double kFreeWaterDiffusivity = 3.0e-3;  // d0, mm^2/s
inline constexpr double kStickRadialDiffusivity = 0.2e-3;  // lambda_perp, mm^2/s
inline constexpr double kStickMinDiffusivity = 1e-5;
inline constexpr double kStickMaxDiffusivity = 4.0e-3;

/// Two-compartment parameters. The stick is an axially symmetric tensor with
/// axial diffusivity d along n and fixed radial diffusivity lambda_perp;
/// lambda_perp = 0 gives the zero-radius stick.
struct BallStickParams {
  double f = 0.0;  // free water weight
  double d = 1e-3;  // stick axial diffusivity, mm^2/s
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
  double d0 = kFreeWaterDiffusivity;
  double lambda_perp = kStickRadialDiffusivity;
};

struct FitConfig {
  double d0 = kFreeWaterDiffusivity;
  double lambda_perp = kStickRadialDiffusivity;
  double d_min = kStickMinDiffusivity;
  double d_max = kStickMaxDiffusivity;
  double initial_f = 0.1;
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
  int restarts = 2;
  double degenerate_f = 0.95;
  double degenerate_margin = 1e-5;  // on d - lambda_perp, mm^2/s
};

/// Normalized signal (S / S0) for every scheme entry; 1 at b = 0.
Eigen::VectorXd predict_ballstick(const BallStickParams& p, const io::GradientScheme& scheme);

/// n = (sin t cos p, sin t sin p, cos t).
Eigen::Vector3d direction_from_angles(double theta, double phi);
std::pair<double, double> angles_from_direction(const Eigen::Vector3d& n);

/// Analytic derivatives of predict_ballstick, columns (f, d, theta, phi).
Eigen::MatrixXd ballstick_jacobian(const BallStickParams& p, const io::GradientScheme& scheme);

/// Antipodal representative with z >= 0 (ties broken by y >= 0, then x >= 0).
Eigen::Vector3d canonical_hemisphere(Eigen::Vector3d n);

/// Angle in degrees between two axes, ignoring sign.
double axis_angle_degrees(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

struct Attenuation {
  Eigen::VectorXd normalized;
  double s0 = 0.0;
};

/// s0 = mean of the b = 0 signals. Throws InvalidScheme without b = 0
/// entries and NonPositiveS0 when s0 <= 0.
Attenuation normalize_attenuation(const Eigen::VectorXd& signals, const io::GradientScheme& scheme);

/// Levenberg-Marquardt fit of (f, d, n) with d0 and lambda_perp fixed.
///
/// f is optimized through a logistic transform, log d through a logistic
/// map onto [log d_min, log d_max], and n through spherical angles in a
/// frame whose equator passes through the initial direction. The result
/// never has a larger residual than the initialization.
class BallStickFitter {
public:
  /// Throws InsufficientDirections with fewer than 6 non-collinear weighted
  /// directions.
  BallStickFitter(const io::GradientScheme& scheme, FitConfig config = {});

  /// Initialization from a log-linear tensor fit (n = e1, d = AD, f =
  /// initial_f), falling back to the most attenuated direction when the
  /// tensor design is singular.
  std::pair<BallStickParams, FitDiagnostics> fit(const Eigen::Ref<const Eigen::VectorXd>& normalized) const;

  std::pair<BallStickParams, FitDiagnostics> fit(const Eigen::Ref<const Eigen::VectorXd>& normalized,
                                                 const BallStickParams& init) const;

  /// Initial guess from the voxel's tensor fit (or the fallback above).
  BallStickParams initial_guess(const Eigen::Ref<const Eigen::VectorXd>& normalized) const;

  const FitConfig& config() const noexcept { return config_; }

private:
  struct Run;
  Run run_lm(const Eigen::Ref<const Eigen::VectorXd>& y, const BallStickParams& init) const;

  io::GradientScheme scheme_;
  FitConfig config_;
  Eigen::VectorXd b_;        // s/mm^2
  Eigen::MatrixXd g_;        // n x 3
  Eigen::VectorXd ball_;     // exp(-b d0)
  std::shared_ptr<const DtiFitter> tensor_fitter_;
};

std::pair<BallStickParams, FitDiagnostics> fit_ballstick_voxel(const Eigen::VectorXd& normalized,
                                                               const io::GradientScheme& scheme,
                                                               const FitConfig& config = {});

}  // namespace cordscan::models
