#include "cordscan/stats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cordscan/error.hpp"

namespace cordscan::stats {

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x) {
  if (x.rows() < 3) {
    throw Error(ErrorCode::InsufficientSamples,
                "correlation needs at least 3 rows, got " + std::to_string(x.rows()));
  }
  if (!x.allFinite()) throw Error(ErrorCode::InvalidArgument, "correlation input has a non-finite value");
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    // Rounding residue of a constant column is far below this scale.
    const double scale = x.col(j).cwiseAbs().maxCoeff();
    if (!(norms(j) > 1e-14 * scale * std::sqrt(static_cast<double>(x.rows())))) {
      throw Error(ErrorCode::ZeroVariance, "column " + std::to_string(j) + " is constant over the selected rows");
    }
  }
  const Eigen::MatrixXd unit = centered.array().rowwise() / norms.transpose().array();
  Eigen::MatrixXd r = unit.transpose() * unit;
  r = 0.5 * (r + r.transpose()).eval();
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return r;
}

CorrelationMatrix correlation_matrix(const regions::CohortTable& table, std::span<const std::size_t> rows) {
  const std::size_t n = rows.empty() ? table.rows.size() : rows.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), kMetricCount);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[rows.empty() ? i : rows[i]];
    for (std::size_t j = 0; j < kMetricCount; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.metrics[j];
  }
  try {
    return correlation_matrix(x);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    for (Metric m : kAllMetrics) {
      const auto col = x.col(static_cast<Eigen::Index>(index(m)));
      if (col.maxCoeff() == col.minCoeff()) {
        throw Error(ErrorCode::ZeroVariance, std::string(display_name(m)) + " is constant over the selected rows");
      }
    }
    throw;
  }
}

}  // namespace cordscan::stats
