#include "cordscan/classify/standardize.hpp"

#include <cmath>
#include <string>

#include "cordscan/error.hpp"

namespace cordscan::classify {

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) throw Error(ErrorCode::ZeroVarianceColumn, "cannot standardize an empty matrix");
  Standardizer s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd c = x.col(j).array() - s.mean(j);
    // Second pass removes the rounding left in the first mean.
    const double shift = c.mean();
    s.mean(j) += shift;
    const double sd = std::sqrt((c.array() - shift).square().sum() / n);
    const double magnitude = x.col(j).cwiseAbs().maxCoeff();
    if (!(sd > 1e-14 * magnitude) || !std::isfinite(sd)) {
      throw Error(ErrorCode::ZeroVarianceColumn, "column " + std::to_string(j) + " has zero variance");
    }
    s.scale(j) = sd;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& x) { return Standardizer::fit(x).apply(x); }

}  // namespace cordscan::classify
