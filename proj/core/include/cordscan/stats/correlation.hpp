#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "cordscan/metrics.hpp"
#include "cordscan/regions/cohort.hpp"

namespace cordscan::stats {

/// Pearson correlations between the six metrics, indexed by index(Metric).
using CorrelationMatrix = Eigen::Matrix<double, kMetricCount, kMetricCount>;

/// Pearson correlation between the columns of x (rows are observations).
/// The result is symmetric with an exact unit diagonal and entries clamped
/// to [-1, 1]. Throws InsufficientSamples below 3 rows and ZeroVariance
/// when a column is constant.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x);

/// Correlation of the six metrics over the given rows of the table (all
/// rows when `rows` is empty).
CorrelationMatrix correlation_matrix(const regions::CohortTable& table, std::span<const std::size_t> rows = {});

}  // namespace cordscan::stats
