#pragma once

#include <Eigen/Core>

namespace cordscan::classify {

/// Per-column centering and scaling by the population standard deviation.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  /// Throws ZeroVarianceColumn naming the first constant column.
  static Standardizer fit(const Eigen::MatrixXd& x);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// Columns of the result have mean 0 and population std 1.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& x);

}  // namespace cordscan::classify
