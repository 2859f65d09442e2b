#include "cordscan/classify/lda.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cordscan/error.hpp"

namespace cordscan::classify {

Eigen::VectorXd LdaModel::scores(const Eigen::MatrixXd& x) const { return (x * w).array() + b; }

LdaModel fit_lda(const Eigen::MatrixXd& x, std::span<const int> y, double ridge) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
  }
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge must be non-negative");
  const Eigen::Index p = x.cols();
  Eigen::VectorXd sum0 = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd sum1 = Eigen::VectorXd::Zero(p);
  double n0 = 0.0;
  double n1 = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int label = y[static_cast<std::size_t>(i)];
    if (label != 0 && label != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    if (label == 1) {
      sum1 += x.row(i).transpose();
      n1 += 1.0;
    } else {
      sum0 += x.row(i).transpose();
      n0 += 1.0;
    }
  }
  if (n0 == 0.0 || n1 == 0.0) {
    throw Error(ErrorCode::SingleClassTraining, "training labels contain a single class");
  }

  LdaModel m;
  m.mean0 = sum0 / n0;
  m.mean1 = sum1 / n1;
  m.prior1 = n1 / (n0 + n1);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd d = x.row(i).transpose() - (y[static_cast<std::size_t>(i)] == 1 ? m.mean1 : m.mean0);
    scatter.noalias() += d * d.transpose();
  }
  const double dof = n0 + n1 - 2.0;
  m.covariance = dof > 0.0 ? Eigen::MatrixXd(scatter / dof) : Eigen::MatrixXd::Zero(p, p);
  m.covariance.diagonal().array() += ridge;

  const Eigen::VectorXd delta = m.mean1 - m.mean0;
  if (ridge == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.covariance, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (dof <= 0.0 || !(eig.eigenvalues().minCoeff() > 1e-12 * top)) {
      throw Error(ErrorCode::SingularCovariance, "pooled covariance is singular; use a positive ridge");
    }
  }
  m.w = m.covariance.ldlt().solve(delta);
  m.b = -m.w.dot(0.5 * (m.mean0 + m.mean1)) + std::log(n1 / n0);
  if (!m.w.allFinite() || !std::isfinite(m.b)) {
    throw Error(ErrorCode::SingularCovariance, "discriminant has non-finite coefficients");
  }
  return m;
}

}  // namespace cordscan::classify
