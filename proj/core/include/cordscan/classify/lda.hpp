#pragma once

#include <span>

#include <Eigen/Core>

namespace cordscan::classify {

/// Two-class linear discriminant; score(x) = w.x + b > 0 favours class 1.
struct LdaModel {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd mean0;
  Eigen::VectorXd mean1;
  Eigen::MatrixXd covariance;  // pooled, ridge included
  double prior1 = 0.5;

  double score(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return x.dot(w) + b; }
  Eigen::VectorXd scores(const Eigen::MatrixXd& x) const;
};

inline constexpr double kDefaultRidge = 1e-8;

/// Fits w = S^-1 (mu1 - mu0) with S the pooled within-class covariance
/// (denominator n - 2) plus ridge * I, and b placing the boundary at the
/// midpoint shifted by log(prior1 / prior0), priors from class counts.
///
/// Labels are 0/1. Throws SingleClassTraining unless both classes are
/// present, and SingularCovariance when ridge is 0 and S is singular.
LdaModel fit_lda(const Eigen::MatrixXd& x, std::span<const int> y, double ridge = kDefaultRidge);

}  // namespace cordscan::classify
