#include "cordscan/models/dti.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "cordscan/error.hpp"
#include "cordscan/models/ballstick.hpp"

namespace cordscan::models {
namespace {

// The design works in ms/um^2 (b * 1e-3) so the columns are O(1).
constexpr double kBScale = 1e-3;

}  // namespace

DiffusionTensor DiffusionTensor::from_matrix(const Eigen::Matrix3d& d, double s0) {
  DiffusionTensor t;
  t.components = {d(0, 0), d(1, 1), d(2, 2), 0.5 * (d(0, 1) + d(1, 0)), 0.5 * (d(0, 2) + d(2, 0)),
                  0.5 * (d(1, 2) + d(2, 1))};
  t.s0 = s0;
  return t;
}

Eigen::Matrix3d DiffusionTensor::matrix() const {
  const auto& c = components;
  Eigen::Matrix3d d;
  d << c[0], c[3], c[4], c[3], c[1], c[5], c[4], c[5], c[2];
  return d;
}

Eigen::VectorXd predict_dti(const DiffusionTensor& tensor, const io::GradientScheme& scheme) {
  const Eigen::Matrix3d d = tensor.matrix();
  Eigen::VectorXd s(static_cast<Eigen::Index>(scheme.size()));
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    const auto& e = scheme[i];
    s[static_cast<Eigen::Index>(i)] = e.b == 0.0 ? tensor.s0 : tensor.s0 * std::exp(-e.b * e.g.dot(d * e.g));
  }
  return s;
}

DtiFitter::DtiFitter(const io::GradientScheme& scheme) {
  const auto n = static_cast<Eigen::Index>(scheme.size());
  if (n < 7) throw Error(ErrorCode::InsufficientDirections, "tensor fit needs at least 7 measurements");
  design_.resize(n, 7);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = scheme[static_cast<std::size_t>(i)];
    const double b = e.b * kBScale;
    const Eigen::Vector3d& g = e.g;
    design_.row(i) << 1.0, -b * g.x() * g.x(), -b * g.y() * g.y(), -b * g.z() * g.z(), -2 * b * g.x() * g.y(),
        -2 * b * g.x() * g.z(), -2 * b * g.y() * g.z();
    if (e.b == 0.0) b0_rows_.push_back(static_cast<int>(i));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_);
  qr.setThreshold(1e-10);
  if (qr.rank() < 7 || scheme.tensor_rank() < 6) {
    throw Error(ErrorCode::RankDeficientDesign, "gradient directions do not span the tensor space");
  }
  // Normal-equation solve through QR of the design; reused for every voxel.
  pinv_ = qr.solve(Eigen::MatrixXd::Identity(n, n));
}

std::pair<DiffusionTensor, FitDiagnostics> DtiFitter::fit(const Eigen::Ref<const Eigen::VectorXd>& signals) const {
  const Eigen::Index n = design_.rows();
  if (signals.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "signal length does not match the gradient scheme");
  }
  double reference = 0.0;
  if (!b0_rows_.empty()) {
    for (int r : b0_rows_) reference += signals[r];
    reference /= static_cast<double>(b0_rows_.size());
  }
  if (!(reference > 0.0)) reference = std::max(signals.maxCoeff(), 1.0);
  const double floor = 1e-6 * reference;

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = signals[i];
    y[i] = std::log(std::isfinite(s) && s > floor ? s : floor);
  }
  const Eigen::Matrix<double, 7, 1> beta = pinv_ * y;

  FitDiagnostics diag;
  diag.rss = (design_ * beta - y).squaredNorm();
  diag.initial_rss = diag.rss;
  diag.iterations = 1;
  diag.converged = beta.allFinite();

  Eigen::Matrix3d d;
  d << beta[1], beta[4], beta[5], beta[4], beta[2], beta[6], beta[5], beta[6], beta[3];
  d *= kBScale;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(d);
  if (eig.eigenvalues().minCoeff() < kMinEigenvalue) {
    const Eigen::Vector3d clamped = eig.eigenvalues().cwiseMax(kMinEigenvalue);
    d = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  }
  return {DiffusionTensor::from_matrix(d, std::exp(beta[0])), diag};
}

std::pair<DiffusionTensor, FitDiagnostics> fit_dti_voxel(const Eigen::VectorXd& signals,
                                                         const io::GradientScheme& scheme) {
  return DtiFitter(scheme).fit(signals);
}

DtiMetrics dti_metrics(const DiffusionTensor& tensor) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(tensor.matrix());
  // Eigen returns ascending order.
  const Eigen::Vector3d asc = eig.eigenvalues();
  DtiMetrics m;
  m.eigenvalues = Eigen::Vector3d(asc[2], asc[1], asc[0]);
  m.e1 = canonical_hemisphere(eig.eigenvectors().col(2));
  m.ad = m.eigenvalues[0];
  m.rd = 0.5 * (m.eigenvalues[1] + m.eigenvalues[2]);
  m.md = (m.ad + 2.0 * m.rd) / 3.0;
  const double mean = m.eigenvalues.mean();
  const double norm = m.eigenvalues.norm();
  m.fa = norm > 0.0 ? std::sqrt(1.5) * (m.eigenvalues.array() - mean).matrix().norm() / norm : 0.0;
  m.fa = std::clamp(m.fa, 0.0, 1.0);
  return m;
}

}  // namespace cordscan::models
