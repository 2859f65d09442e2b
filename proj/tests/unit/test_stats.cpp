#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cordscan/error.hpp"
#include "cordscan/rng.hpp"
#include "cordscan/stats/correlation.hpp"
#include "cordscan/stats/distributions.hpp"
#include "cordscan/stats/pooling.hpp"
#include "cordscan/stats/welch.hpp"
#include "support.hpp"

using namespace cordscan;
using namespace cordscan::stats;
using cordscan::testing::number;
using cordscan::testing::numbers;
using cordscan::testing::read_oracle;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no cordscan::Error thrown";
  return ErrorCode::InvalidArgument;
}

double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - p[i], p[i] - static_cast<double>(i) / n});
  }
  return d;
}

struct LongTable {
  std::vector<std::string> subjects;
  std::vector<int> levels;
  std::vector<double> values;
};

/// subjects x levels, value = subject effect + level offset + N(0, 1).
LongTable simulate_levels(std::size_t subjects, int levels, const std::vector<double>& offset, CounterRng& rng) {
  LongTable t;
  for (std::size_t s = 0; s < subjects; ++s) {
    const double effect = rng.normal(0.0, 1.0);
    for (int l = 1; l <= levels; ++l) {
      t.subjects.push_back("s" + std::to_string(s));
      t.levels.push_back(l);
      t.values.push_back(effect + offset[static_cast<std::size_t>(l)] + rng.normal());
    }
  }
  return t;
}

}  // namespace

TEST(Distributions, TCdfMatchesHighPrecisionOracle) {
  const auto rows = read_oracle("t_cdf.csv");
  ASSERT_EQ(rows.size(), 1000u);
  for (const auto& r : rows) {
    EXPECT_NEAR(t_cdf(number(r[0]), number(r[1])), number(r[2]), 1e-12) << r[0] << " df " << r[1];
  }
}

TEST(Distributions, TCdfIdentities) {
  for (double df : {0.5, 1.0, 3.0, 10.0, 1e4}) {
    EXPECT_EQ(t_cdf(0.0, df), 0.5);
    for (double x : {0.1, 1.0, 2.5, 10.0}) EXPECT_NEAR(t_cdf(-x, df), 1.0 - t_cdf(x, df), 1e-15);
  }
  EXPECT_NEAR(t_cdf(1.96, 1e6), normal_cdf(1.96), 1e-6);
  EXPECT_NEAR(t_cdf(1.96, 1e6), 0.975002, 1e-6);
  EXPECT_NEAR(t_cdf(1.0, 1.0), 0.75, 1e-15);  // Cauchy
  EXPECT_TRUE(std::isnan(t_cdf(1.0, 0.0)));
}

TEST(Distributions, TCdfMonotone) {
  for (double df : {0.7, 2.0, 5.0, 30.0, 1e5}) {
    double prev = 0.0;
    for (double x = -60.0; x <= 60.0; x += 0.05) {
      const double c = t_cdf(x, df);
      EXPECT_GE(c, prev) << "x " << x << " df " << df;
      prev = c;
    }
  }
}

TEST(Distributions, IncompleteBetaIdentities) {
  for (double x : {0.0, 0.1, 0.5, 0.93, 1.0}) EXPECT_NEAR(incomplete_beta(1.0, 1.0, x), x, 1e-15);
  EXPECT_NEAR(incomplete_beta(2.0, 3.0, 0.4), 1.0 - incomplete_beta(3.0, 2.0, 0.6), 1e-15);
  // I_x(a, 1) = x^a
  EXPECT_NEAR(incomplete_beta(3.5, 1.0, 0.7), std::pow(0.7, 3.5), 1e-15);
  EXPECT_NEAR(log_beta(2.0, 3.0), std::log(1.0 / 12.0), 1e-15);
  EXPECT_NEAR(log_beta(1e6, 0.5), std::lgamma(1e6) + std::lgamma(0.5) - std::lgamma(1e6 + 0.5), 1e-8);
}

TEST(Distributions, StudentizedRangeMatchesOracle) {
  const auto rows = read_oracle("studentized_range.csv");
  ASSERT_GT(rows.size(), 200u);
  for (const auto& r : rows) {
    const double df = r[2] == "inf" ? std::numeric_limits<double>::infinity() : number(r[2]);
    EXPECT_NEAR(studentized_range_cdf(number(r[0]), number(r[1]), df), number(r[3]), 1e-8)
        << "q " << r[0] << " k " << r[1] << " df " << r[2];
  }
}

TEST(Distributions, StudentizedRangeTwoMeansIsScaledT) {
  // With k = 2, P(range <= q) = P(|T| <= q / sqrt(2)).
  for (double df : {3.0, 12.0, 40.0}) {
    for (double q : {0.5, 2.0, 4.0}) {
      EXPECT_NEAR(studentized_range_cdf(q, 2.0, df), 1.0 - t_two_sided(q / std::sqrt(2.0), df), 1e-9);
    }
  }
  EXPECT_EQ(studentized_range_cdf(0.0, 3.0, 10.0), 0.0);
  EXPECT_EQ(studentized_range_cdf(std::numeric_limits<double>::infinity(), 3.0, 10.0), 1.0);
}

TEST(Welch, MatchesHighPrecisionOracle) {
  for (const auto& r : read_oracle("welch.csv")) {
    const auto a = numbers(r[1]);
    const auto b = numbers(r[2]);
    const WelchResult w = welch(a, b);
    const double t = number(r[3]);
    const double df = number(r[4]);
    const double p = number(r[5]);
    EXPECT_NEAR(w.t, t, 1e-9 * std::fabs(t)) << r[0];
    EXPECT_NEAR(w.df, df, 1e-9 * df) << r[0];
    EXPECT_NEAR(w.p, p, 1e-9 * std::max(p, 1e-3)) << r[0];
    EXPECT_EQ(w.n_a, a.size());
  }
}

TEST(Welch, IdenticalSwappedAndDegenerate) {
  const std::vector<double> a{1.0, 2.5, 3.0, 4.2};
  const std::vector<double> b{2.0, 2.2, 5.0, 1.0, 7.0};
  const WelchResult same = welch(a, a);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.p, 1.0);

  const WelchResult ab = welch(a, b);
  const WelchResult ba = welch(b, a);
  EXPECT_EQ(ab.t, -ba.t);
  EXPECT_EQ(ab.p, ba.p);
  EXPECT_EQ(ab.df, ba.df);
  EXPECT_GT(ab.df, 0.0);

  const std::vector<double> c1{2.0, 2.0, 2.0};
  const std::vector<double> c2{3.0, 3.0};
  const WelchResult eq = welch(c1, c1);
  EXPECT_TRUE(eq.degenerate);
  EXPECT_EQ(eq.p, 1.0);
  const WelchResult ne = welch(c1, c2);
  EXPECT_TRUE(ne.degenerate);
  EXPECT_EQ(ne.p, 0.0);
  EXPECT_TRUE(std::isinf(ne.t));
  EXPECT_LT(ne.t, 0.0);

  // One constant sample is not degenerate: the other carries the variance.
  EXPECT_FALSE(welch(c1, b).degenerate);
}

TEST(Welch, Errors) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_EQ(code_of([&] { welch(one, two); }), ErrorCode::InsufficientSamples);
  EXPECT_EQ(code_of([&] { welch(two, bad); }), ErrorCode::InsufficientSamples);
}

TEST(Welch, NullPValuesAreUniform) {
  CounterRng rng(41);
  std::vector<double> p;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t na = 5 + rng.below(20);
    const std::size_t nb = 5 + rng.below(20);
    const double sa = 0.5 + 2.0 * rng.uniform();
    const double sb = 0.5 + 2.0 * rng.uniform();
    std::vector<double> a(na);
    std::vector<double> b(nb);
    for (double& x : a) x = rng.normal(1.0, sa);
    for (double& x : b) x = rng.normal(1.0, sb);
    p.push_back(welch(a, b).p);
  }
  EXPECT_LT(ks_uniform(p), 0.02);
}

TEST(Welch, GroupComparisonLayout) {
  regions::CohortTable t;
  CounterRng rng(42);
  for (int s = 0; s < 10; ++s) {
    for (int level = 2; level <= 4; ++level) {
      regions::CohortRow h;
      h.subject = "hc" + std::to_string(s);
      h.level = level;
      regions::CohortRow p = h;
      p.subject = "pat" + std::to_string(s);
      p.group = regions::Group::Patient;
      p.lesion_fraction = s < 4 ? 0.0 : 0.02 * s + 0.001;
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        h.metrics[m] = rng.normal();
        p.metrics[m] = rng.normal();
      }
      t.rows.push_back(h);
      t.rows.push_back(p);
    }
  }
  const std::vector<double> thr{0.05, 0.10};
  const auto out = compare_groups(t, thr);
  ASSERT_EQ(out.size(), 18u);
  EXPECT_EQ(out[0].label, "NAWM");
  EXPECT_EQ(out[1].label, "MS(5%)");
  EXPECT_EQ(out[2].label, "MS(10%)");
  EXPECT_EQ(out[0].result.n_b, 12u);
  EXPECT_EQ(out[1].result.n_b, 18u);  // fractions 0.081..0.181
  EXPECT_EQ(out[2].result.n_b, 15u);
  EXPECT_EQ(out[3].metric, Metric::StickAd);
  EXPECT_EQ(out[0].result.n_a, 30u);

  // A threshold that leaves fewer than two rows is skipped, not fatal.
  const std::vector<double> high{0.5};
  EXPECT_EQ(compare_groups(t, high).size(), 6u);
}

TEST(Correlation, AffineDependenceAndErrors) {
  Eigen::MatrixXd x(5, 2);
  x.col(0) << 1, 2, 4, 7, 11;
  x.col(1) = 2.0 * x.col(0).array() + 5.0;
  const Eigen::MatrixXd r = correlation_matrix(x);
  EXPECT_NEAR(r(0, 1), 1.0, 1e-15);
  x.col(1) = -x.col(0);
  EXPECT_NEAR(correlation_matrix(x)(0, 1), -1.0, 1e-15);

  x.col(1).setConstant(3.0);
  EXPECT_EQ(code_of([&] { correlation_matrix(x); }), ErrorCode::ZeroVariance);
  EXPECT_EQ(code_of([] { correlation_matrix(Eigen::MatrixXd::Random(2, 3)); }), ErrorCode::InsufficientSamples);
}

TEST(Correlation, IndependentColumnsNearZeroAndPsd) {
  CounterRng rng(43);
  Eigen::MatrixXd x(10000, 6);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) x(i, j) = rng.normal();
  }
  const Eigen::MatrixXd r = correlation_matrix(x);
  for (Eigen::Index i = 0; i < 6; ++i) {
    EXPECT_EQ(r(i, i), 1.0);
    for (Eigen::Index j = 0; j < 6; ++j) {
      if (i != j) EXPECT_LT(std::fabs(r(i, j)), 0.05);
      EXPECT_EQ(r(i, j), r(j, i));
    }
  }
}

TEST(Correlation, SymmetricPositiveSemidefinite) {
  CounterRng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(30));
    Eigen::MatrixXd x(n, 6);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double common = rng.normal();
      for (Eigen::Index j = 0; j < 6; ++j) x(i, j) = common * (j % 3) + rng.normal();
    }
    const Eigen::MatrixXd r = correlation_matrix(x);
    EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10);
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(Correlation, MdIsExactlyLinearInAdAndRdOnFittedCohort) {
  phantom::CohortDesign d;
  d.healthy = 3;
  d.patients = 2;
  d.large_rows = 2;
  d.medium_rows = 1;
  d.small_rows = 1;
  const regions::CohortTable t = cordscan::testing::simulate_cohort(d, {2, 3, 4});
  ASSERT_EQ(t.rows.size(), 15u);
  Eigen::MatrixXd x(15, 2);
  for (Eigen::Index i = 0; i < 15; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    x(i, 0) = row.metric(Metric::Md);
    x(i, 1) = (row.metric(Metric::Ad) + 2.0 * row.metric(Metric::Rd)) / 3.0;
  }
  EXPECT_NEAR(correlation_matrix(x)(0, 1), 1.0, 1e-12);
  const CorrelationMatrix full = correlation_matrix(t);
  EXPECT_EQ(full(index(Metric::Fa), index(Metric::Fa)), 1.0);
  const std::vector<std::size_t> rows{0, 1};
  EXPECT_EQ(code_of([&] { correlation_matrix(t, rows); }), ErrorCode::InsufficientSamples);
}

TEST(Pooling, ExactFitWithEqualMeansGivesUnitP) {
  const std::vector<std::string> s{"a", "a", "b", "b"};
  const std::vector<int> l{1, 2, 1, 2};
  const std::vector<double> v{1.0, 1.0, 3.0, 3.0};
  const LevelComparison c = level_pooling(s, l, v);
  ASSERT_EQ(c.pairs.size(), 1u);
  EXPECT_EQ(c.pairs[0].p, 1.0);
  EXPECT_FALSE(c.pairs[0].significant);
  EXPECT_EQ(c.df, 1.0);
}

TEST(Pooling, BalancedEmmsAreLevelMeans) {
  CounterRng rng(45);
  const LongTable t = simulate_levels(6, 4, std::vector<double>(8, 0.0), rng);
  const LevelComparison c = level_pooling(t.subjects, t.levels, t.values);
  for (int l = 1; l <= 4; ++l) {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      if (t.levels[i] == l) sum += t.values[i];
    }
    EXPECT_NEAR(c.emm[static_cast<std::size_t>(l - 1)], sum / 6.0, 1e-12);
  }
  EXPECT_EQ(c.df, 15.0);  // 24 - 1 - 5 - 3
  EXPECT_EQ(c.pairs.size(), 6u);
  ASSERT_NE(c.find(3, 1), nullptr);
  EXPECT_EQ(c.find(3, 1)->level_a, 1);
  EXPECT_EQ(c.find(1, 9), nullptr);
}

TEST(Pooling, SubjectShiftLeavesLevelDifferencesUnchanged) {
  CounterRng rng(46);
  LongTable t = simulate_levels(8, 7, std::vector<double>(8, 0.0), rng);
  // Drop a few cells so the design is unbalanced.
  t.subjects.erase(t.subjects.begin() + 3);
  t.levels.erase(t.levels.begin() + 3);
  t.values.erase(t.values.begin() + 3);
  const LevelComparison a = level_pooling(t.subjects, t.levels, t.values);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    if (t.subjects[i] == "s2") t.values[i] += 17.0;
  }
  const LevelComparison b = level_pooling(t.subjects, t.levels, t.values);
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    EXPECT_NEAR(a.pairs[i].diff, b.pairs[i].diff, 1e-10);
    EXPECT_NEAR(a.pairs[i].p, b.pairs[i].p, 1e-9);
  }
  for (std::size_t i = 1; i < a.emm.size(); ++i) {
    EXPECT_NEAR(a.emm[i] - a.emm[0], b.emm[i] - b.emm[0], 1e-10);
  }
}

TEST(Pooling, LargeOffsetFlaggedAgainstEveryLevel) {
  CounterRng rng(47);
  std::vector<double> offset(8, 0.0);
  offset[5] = 10.0;  // residual sd is 1
  const LongTable t = simulate_levels(10, 7, offset, rng);
  const LevelComparison c = level_pooling(t.subjects, t.levels, t.values);
  for (int l = 1; l <= 7; ++l) {
    if (l != 5) EXPECT_TRUE(c.significant(5, l)) << "C5 vs C" << l;
  }
}

TEST(Pooling, NullCalibration) {
  CounterRng rng(48);
  int clean = 0;
  const int cohorts = 1000;
  for (int i = 0; i < cohorts; ++i) {
    const LongTable t = simulate_levels(10, 7, std::vector<double>(8, 0.0), rng);
    const LevelComparison c = level_pooling(t.subjects, t.levels, t.values);
    if (std::none_of(c.pairs.begin(), c.pairs.end(), [](const auto& p) { return p.significant; })) ++clean;
  }
  EXPECT_GE(clean, 940) << clean << " of " << cohorts << " null cohorts had no flagged pair";
}

TEST(Pooling, Errors) {
  const std::vector<std::string> s{"a", "a", "b", "b", "b"};
  const std::vector<int> l{1, 2, 1, 2, 3};
  const std::vector<double> v{1.0, 2.0, 1.5, 2.5, 3.0};
  EXPECT_EQ(code_of([&] { level_pooling(s, l, v); }), ErrorCode::UnbalancedDesignUnderdetermined);
  const std::vector<std::string> s2{"a", "a", "b", "b"};
  const std::vector<int> l2{1, 2, 1, 2};
  const std::vector<double> v2{1.0, 2.0, 1.5};
  EXPECT_EQ(code_of([&] { level_pooling(s2, l2, v2); }), ErrorCode::DimensionMismatch);
  // Disconnected layout: levels 1-2 seen only by a, b; levels 3-4 only by c, d.
  const std::vector<std::string> s3{"a", "a", "b", "b", "c", "c", "d", "d"};
  const std::vector<int> l3{1, 2, 1, 2, 3, 4, 3, 4};
  const std::vector<double> v3{1, 2, 3, 4, 5, 6, 7, 9};
  EXPECT_EQ(code_of([&] { level_pooling(s3, l3, v3); }), ErrorCode::UnbalancedDesignUnderdetermined);
}

namespace {

LevelComparison comparison_with(Metric m, std::vector<std::pair<int, int>> flagged) {
  LevelComparison c;
  c.metric = m;
  c.levels = {1, 2, 3, 4, 5, 6, 7};
  for (int a = 1; a <= 7; ++a) {
    for (int b = a + 1; b <= 7; ++b) {
      PairComparison p;
      p.level_a = a;
      p.level_b = b;
      p.significant = std::find(flagged.begin(), flagged.end(), std::pair{a, b}) != flagged.end();
      p.p = p.significant ? 0.01 : 0.5;
      c.pairs.push_back(p);
    }
  }
  return c;
}

std::vector<std::string> names(const std::vector<LevelInterval>& v) {
  std::vector<std::string> out;
  for (const auto& i : v) out.push_back(i.to_string());
  return out;
}

}  // namespace

TEST(PoolingReport, NoSignificantPairsGivesOneInterval) {
  std::vector<LevelComparison> cs;
  for (Metric m : kAllMetrics) cs.push_back(comparison_with(m, {}));
  const PoolingReport r = pooling_report(cs);
  for (const auto& pm : r.per_metric) EXPECT_EQ(names(pm.intervals), std::vector<std::string>{"C1-C7"});
  EXPECT_EQ(names(r.intersection), std::vector<std::string>{"C1-C7"});
}

TEST(PoolingReport, OnePairSplitsOneMetric) {
  std::vector<LevelComparison> cs;
  for (Metric m : kAllMetrics) cs.push_back(comparison_with(m, m == Metric::Md ? std::vector{std::pair{3, 5}} : std::vector<std::pair<int, int>>{}));
  const PoolingReport r = pooling_report(cs);
  EXPECT_EQ(names(r.per_metric[index(Metric::Md)].intervals), (std::vector<std::string>{"C1-C4", "C4-C7"}));
  EXPECT_EQ(names(r.per_metric[index(Metric::Fa)].intervals), std::vector<std::string>{"C1-C7"});
  EXPECT_EQ(names(r.intersection), (std::vector<std::string>{"C1-C4", "C4-C7"}));
}

TEST(PoolingReport, IntersectionCombinesMetrics) {
  std::vector<LevelComparison> cs;
  cs.push_back(comparison_with(Metric::Fww, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {1, 7}}));
  cs.push_back(comparison_with(Metric::Fa, {{4, 5}, {3, 5}, {2, 5}, {1, 5}, {5, 6}, {5, 7}, {2, 6}, {3, 6}, {4, 6}}));
  cs.push_back(comparison_with(Metric::Md, {{6, 7}, {2, 7}, {3, 7}, {4, 7}}));
  const PoolingReport r = pooling_report(cs);
  EXPECT_EQ(names(r.per_metric[0].intervals), (std::vector<std::string>{"C1", "C2-C7"}));
  EXPECT_EQ(names(r.intersection), (std::vector<std::string>{"C1", "C2-C4", "C5", "C6", "C7"}));
  EXPECT_EQ(names(r.pooled()), std::vector<std::string>{"C2-C4"});
}
