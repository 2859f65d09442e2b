#pragma once

#include <array>
#include <utility>

#include <Eigen/Core>

#include "cordscan/io/scheme.hpp"
#include "cordscan/models/diagnostics.hpp"

namespace cordscan::models {

/// Eigenvalue floor applied after fitting (mm^2/s).
inline constexpr double kMinEigenvalue = 1e-9;

/// Symmetric diffusion tensor stored as its six unique components
/// (xx, yy, zz, xy, xz, yz) in mm^2/s, plus the non-weighted signal s0.
struct DiffusionTensor {
  std::array<double, 6> components{};
  double s0 = 1.0;

  static DiffusionTensor from_matrix(const Eigen::Matrix3d& d, double s0 = 1.0);
  Eigen::Matrix3d matrix() const;
};

struct DtiMetrics {
  double fa = 0.0;  // [0, 1]
  double md = 0.0;  // mm^2/s
  double ad = 0.0;
  double rd = 0.0;
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();  // descending
  Eigen::Vector3d e1 = Eigen::Vector3d::UnitZ();           // canonical hemisphere
};

/// S = s0 * exp(-b g^T D g) for every scheme entry.
Eigen::VectorXd predict_dti(const DiffusionTensor& tensor, const io::GradientScheme& scheme);

/// Log-linear least-squares tensor fit with a design precomputed per scheme.
class DtiFitter {
public:
  /// Throws RankDeficientDesign when the weighted directions do not span the
  /// six tensor components, InsufficientDirections with fewer than 7 entries.
  explicit DtiFitter(const io::GradientScheme& scheme);

  /// Signals at or below 1e-6 * (mean b0 signal) are clamped before the log.
  /// Eigenvalues below kMinEigenvalue are raised to it. diagnostics.rss is
  /// the log-domain residual sum of squares.
  std::pair<DiffusionTensor, FitDiagnostics> fit(const Eigen::Ref<const Eigen::VectorXd>& signals) const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(design_.rows()); }

private:
  Eigen::MatrixXd design_;   // n x 7, b in ms/um^2
  Eigen::MatrixXd pinv_;     // 7 x n
  std::vector<int> b0_rows_;
};

std::pair<DiffusionTensor, FitDiagnostics> fit_dti_voxel(const Eigen::VectorXd& signals,
                                                         const io::GradientScheme& scheme);

/// Rotation-invariant scalars. MD is computed as (AD + 2 RD) / 3 so the
/// identity holds exactly in floating point.
DtiMetrics dti_metrics(const DiffusionTensor& tensor);

}  // namespace cordscan::models
