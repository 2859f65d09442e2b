#include "cordscan/stats/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "cordscan/error.hpp"
#include "cordscan/stats/distributions.hpp"

namespace cordscan::stats {
namespace {

[[noreturn]] void underdetermined(const std::string& message) {
  throw Error(ErrorCode::UnbalancedDesignUnderdetermined, message);
}

}  // namespace

const PairComparison* LevelComparison::find(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (const auto& p : pairs) {
    if (p.level_a == a && p.level_b == b) return &p;
  }
  return nullptr;
}

bool LevelComparison::significant(int a, int b) const {
  const auto* p = find(a, b);
  return p && p->significant;
}

LevelComparison level_pooling(std::span<const std::string> subjects, std::span<const int> levels,
                              std::span<const double> values, double alpha) {
  const std::size_t n = values.size();
  if (subjects.size() != n || levels.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "subjects, levels and values must have equal length");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value in level pooling");
  }

  std::map<std::string, int> subject_index;
  std::map<int, int> level_index;
  std::map<int, std::size_t> level_count;
  for (std::size_t i = 0; i < n; ++i) {
    subject_index.emplace(subjects[i], 0);
    level_index.emplace(levels[i], 0);
    ++level_count[levels[i]];
  }
  for (const auto& [level, count] : level_count) {
    if (count < 2) {
      underdetermined("level C" + std::to_string(level) + " is observed for " + std::to_string(count) +
                      " subject(s), need at least 2");
    }
  }
  if (level_index.size() < 2) underdetermined("at least two levels are needed");
  int next = 0;
  for (auto& [_, idx] : subject_index) idx = next++;
  next = 0;
  for (auto& [_, idx] : level_index) idx = next++;

  // Treatment coding: intercept, subjects 1.., levels 1.. (index 0 is the reference).
  const int s_count = static_cast<int>(subject_index.size());
  const int l_count = static_cast<int>(level_index.size());
  const int p = 1 + (s_count - 1) + (l_count - 1);
  const int level_col = s_count;  // column of level index 1
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), p);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = 1.0;
    const int s = subject_index[subjects[i]];
    const int l = level_index[levels[i]];
    if (s > 0) x(r, s) = 1.0;
    if (l > 0) x(r, level_col + l - 1) = 1.0;
    y(r) = values[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) underdetermined("level effects are not estimable from this subject/level layout");
  const double df = static_cast<double>(n) - p;
  if (df < 1.0) underdetermined("no residual degrees of freedom");

  const Eigen::VectorXd theta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * theta;
  const double sigma2 = resid.squaredNorm() / df;
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(p, p));

  LevelComparison out;
  out.observations = n;
  out.df = df;
  out.sigma = std::sqrt(sigma2);
  for (const auto& [level, _] : level_index) out.levels.push_back(level);

  // EMM = mu + level effect + average subject effect.
  auto emm_row = [&](int l) {
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(p);
    c(0) = 1.0;
    for (int s = 1; s < s_count; ++s) c(s) = 1.0 / s_count;
    if (l > 0) c(level_col + l - 1) = 1.0;
    return c;
  };
  for (int l = 0; l < l_count; ++l) {
    const Eigen::RowVectorXd c = emm_row(l);
    out.emm.push_back(c.dot(theta));
    out.emm_se.push_back(std::sqrt(sigma2 * (c * xtx_inv * c.transpose())(0, 0)));
  }

  // Residuals at rounding level mean an exact fit; contrasts at that level are zero.
  const double scale = y.cwiseAbs().maxCoeff();
  const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  const double k = static_cast<double>(l_count);
  for (int a = 0; a < l_count; ++a) {
    for (int b = a + 1; b < l_count; ++b) {
      Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(p);
      if (a > 0) c(level_col + a - 1) = 1.0;
      if (b > 0) c(level_col + b - 1) = -1.0;
      PairComparison pc;
      pc.level_a = out.levels[static_cast<std::size_t>(a)];
      pc.level_b = out.levels[static_cast<std::size_t>(b)];
      pc.diff = c.dot(theta);
      pc.se = std::sqrt(sigma2 * (c * xtx_inv * c.transpose())(0, 0));
      if (out.sigma <= noise_floor) {
        const bool equal = std::fabs(pc.diff) <= noise_floor;
        pc.q = equal ? 0.0 : std::numeric_limits<double>::infinity();
        pc.p = equal ? 1.0 : 0.0;
      } else {
        pc.q = std::fabs(pc.diff) / pc.se * std::numbers::sqrt2;
        pc.p = std::clamp(studentized_range_sf(pc.q, k, df), 0.0, 1.0);
      }
      pc.significant = pc.p < alpha;
      out.pairs.push_back(pc);
    }
  }
  return out;
}

LevelComparison level_pooling(const regions::CohortTable& table, Metric metric, double alpha) {
  std::vector<std::string> subjects;
  std::vector<int> levels;
  std::vector<double> values;
  for (const auto& r : table.rows) {
    subjects.push_back(r.subject);
    levels.push_back(r.level);
    values.push_back(r.metric(metric));
  }
  LevelComparison out = level_pooling(subjects, levels, values, alpha);
  out.metric = metric;
  return out;
}

std::size_t LevelInterval::size(std::span<const int> levels) const {
  return static_cast<std::size_t>(std::count_if(levels.begin(), levels.end(),
                                                [&](int l) { return l >= first && l <= last; }));
}

std::string LevelInterval::to_string() const {
  if (first == last) return "C" + std::to_string(first);
  return "C" + std::to_string(first) + "-C" + std::to_string(last);
}

std::vector<LevelInterval> maximal_runs(std::span<const int> levels,
                                        const std::function<bool(int, int)>& significant) {
  const std::size_t n = levels.size();
  std::vector<LevelInterval> out;
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i;
    while (j + 1 < n) {
      bool clean = true;
      for (std::size_t a = i; a <= j && clean; ++a) clean = !significant(levels[a], levels[j + 1]);
      if (!clean) break;
      ++j;
    }
    // A run ending where the previous one ended is contained in it.
    if (i == 0 || j + 1 > prev_end) out.push_back({levels[i], levels[j]});
    prev_end = j + 1;
  }
  return out;
}

std::vector<LevelInterval> PoolingReport::pooled() const {
  std::vector<LevelInterval> out;
  for (const auto& iv : intersection) {
    if (iv.size(levels) > 1) out.push_back(iv);
  }
  return out;
}

PoolingReport pooling_report(std::span<const LevelComparison> comparisons) {
  PoolingReport report;
  if (comparisons.empty()) return report;
  report.levels = comparisons.front().levels;
  for (const auto& c : comparisons) {
    if (c.levels != report.levels) {
      throw Error(ErrorCode::InvalidArgument, "level comparisons cover different level sets");
    }
    report.per_metric.push_back(
        {c.metric, maximal_runs(report.levels, [&](int a, int b) { return c.significant(a, b); })});
  }
  report.intersection = maximal_runs(report.levels, [&](int a, int b) {
    return std::any_of(comparisons.begin(), comparisons.end(), [&](const auto& c) { return c.significant(a, b); });
  });
  return report;
}

}  // namespace cordscan::stats
