#include "cordscan/classify/repeated_split.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "cordscan/classify/roc.hpp"
#include "cordscan/classify/standardize.hpp"
#include "cordscan/error.hpp"
#include "cordscan/io/csv.hpp"
#include "cordscan/log.hpp"
#include "cordscan/parallel.hpp"
#include "cordscan/rng.hpp"

namespace cordscan::classify {
namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::size_t test_count(std::size_t n, double train_frac) {
  const auto t = static_cast<std::size_t>(std::llround((1.0 - train_frac) * static_cast<double>(n)));
  return std::max<std::size_t>(1, t);
}

/// Moves a uniformly chosen subset of size k to the front of v.
void partial_shuffle(std::vector<std::size_t>& v, std::size_t k, CounterRng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(v.size() - i));
    std::swap(v[i], v[j]);
  }
}

}  // namespace

std::size_t FeatureMatrix::positives() const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

std::string combo_name(std::span<const Metric> combo) {
  return join_metrics(std::vector<Metric>(combo.begin(), combo.end()), "&");
}

FeatureMatrix build_features(const regions::CohortTable& table, std::span<const Metric> combo, double thr) {
  if (combo.empty()) throw Error(ErrorCode::InvalidArgument, "metric combination is empty");
  const auto negatives = regions::select_rows(table, regions::RowClass::V);
  const auto positives = regions::select_ms_rows(table, thr);
  FeatureMatrix f;
  f.thr = thr;
  f.combo.assign(combo.begin(), combo.end());
  f.x.resize(static_cast<Eigen::Index>(negatives.size() + positives.size()), static_cast<Eigen::Index>(combo.size()));
  Eigen::Index r = 0;
  auto add = [&](const std::vector<std::size_t>& rows, int label) {
    for (std::size_t i : rows) {
      for (std::size_t j = 0; j < combo.size(); ++j) f.x(r, static_cast<Eigen::Index>(j)) = table.rows[i].metric(combo[j]);
      f.y.push_back(label);
      ++r;
    }
  };
  add(negatives, 0);
  add(positives, 1);
  return f;
}

RocSummary repeated_split_auc(const FeatureMatrix& features, const SplitOptions& options) {
  if (static_cast<std::size_t>(features.x.rows()) != features.y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
  }
  if (!(options.train_frac > 0.0 && options.train_frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  if (options.n_splits == 0) throw Error(ErrorCode::InvalidArgument, "need at least one split");

  std::vector<std::size_t> neg;
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < features.y.size(); ++i) (features.y[i] == 1 ? pos : neg).push_back(i);

  RocSummary s;
  s.thr = features.thr;
  s.combo = features.combo;
  s.n_splits = options.n_splits;
  s.n_pos = pos.size();
  s.n_neg = neg.size();
  if (pos.size() < 2 || neg.size() < 2) {
    throw Error(ErrorCode::TooFewRows, "need at least 2 rows per class, have " + std::to_string(pos.size()) +
                                           " positive and " + std::to_string(neg.size()) + " negative");
  }
  s.n_pos_test = test_count(pos.size(), options.train_frac);
  s.n_neg_test = test_count(neg.size(), options.train_frac);
  const std::size_t pos_train = pos.size() - s.n_pos_test;
  const std::size_t neg_train = neg.size() - s.n_neg_test;
  if (pos_train == 0 || neg_train == 0 || pos_train + neg_train < 3) {
    throw Error(ErrorCode::TooFewRows, "splits would leave too few training rows");
  }

  const Eigen::MatrixXd scaled = options.no_leak ? features.x : standardize(features.x);

  std::uint64_t key = hash_combine(options.seed, std::bit_cast<std::uint64_t>(features.thr));
  key = hash_combine(key, hash_string(combo_name(features.combo)));

  std::vector<double> aucs(options.n_splits);
  parallel_for(
      options.n_splits, options.threads,
      [&](std::size_t k) {
        CounterRng rng(hash_combine(key, k));
        std::vector<std::size_t> p = pos;
        std::vector<std::size_t> n = neg;
        partial_shuffle(p, s.n_pos_test, rng);
        partial_shuffle(n, s.n_neg_test, rng);
        std::vector<std::size_t> test(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(s.n_pos_test));
        test.insert(test.end(), n.begin(), n.begin() + static_cast<std::ptrdiff_t>(s.n_neg_test));
        std::vector<std::size_t> train(p.begin() + static_cast<std::ptrdiff_t>(s.n_pos_test), p.end());
        train.insert(train.end(), n.begin() + static_cast<std::ptrdiff_t>(s.n_neg_test), n.end());
        std::sort(test.begin(), test.end());
        std::sort(train.begin(), train.end());

        Eigen::MatrixXd x_train = take_rows(scaled, train);
        Eigen::MatrixXd x_test = take_rows(scaled, test);
        if (options.no_leak) {
          const Standardizer st = Standardizer::fit(x_train);
          x_train = st.apply(x_train);
          x_test = st.apply(x_test);
        }
        std::vector<int> y_train;
        std::vector<int> y_test;
        for (std::size_t i : train) y_train.push_back(features.y[i]);
        for (std::size_t i : test) y_test.push_back(features.y[i]);

        const LdaModel model = fit_lda(x_train, y_train, options.ridge);
        const Eigen::VectorXd scores = model.scores(x_test);
        aucs[k] = roc_auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), y_test);
      },
      8);

  // Fixed summation order keeps the result independent of the schedule.
  const double n = static_cast<double>(aucs.size());
  s.auc_mean = std::accumulate(aucs.begin(), aucs.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : aucs) ss += (a - s.auc_mean) * (a - s.auc_mean);
  s.auc_std = std::sqrt(ss / n);
  return s;
}

std::vector<std::vector<Metric>> default_combos() {
  using M = Metric;
  return {
      {M::Fww, M::Rd},
      {M::Fww, M::Fa},
      {M::Fww, M::StickAd},
      {M::Fa, M::Md},
      {M::Fa, M::Md, M::Rd},
      {M::Fww, M::Md, M::StickAd},
      {M::Fww, M::StickAd, M::Md, M::Rd},
      {M::Fww, M::Md, M::Fa, M::Rd},
  };
}

std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(0.02 * i);
  return out;
}

std::vector<RocSummary> run_combinations(const regions::CohortTable& table,
                                         const std::vector<std::vector<Metric>>& combos,
                                         std::span<const double> thresholds, const SplitOptions& options,
                                         bool add_singletons) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "threshold grid is empty");
  std::vector<std::vector<Metric>> all = combos;
  if (add_singletons) {
    for (Metric m : kAllMetrics) {
      const std::vector<Metric> single{m};
      if (std::find(all.begin(), all.end(), single) == all.end()) all.push_back(single);
    }
  }
  std::vector<RocSummary> out;
  for (const auto& combo : all) {
    for (double thr : thresholds) {
      try {
        out.push_back(repeated_split_auc(build_features(table, combo, thr), options));
      } catch (const Error& e) {
        if (is_input_error(e.code())) throw;
        log::warn(combo_name(combo) + " at thr " + io::format_number(thr) + ": " + e.what());
        RocSummary failed;
        failed.thr = thr;
        failed.combo = combo;
        failed.n_splits = options.n_splits;
        failed.auc_mean = std::numeric_limits<double>::quiet_NaN();
        failed.auc_std = std::numeric_limits<double>::quiet_NaN();
        failed.error = std::string(to_string(e.code()));
        for (const auto& r : table.rows) {
          if (r.row_class() == regions::RowClass::V) ++failed.n_neg;
          if (r.group == regions::Group::Patient && r.lesion_fraction > thr) ++failed.n_pos;
        }
        out.push_back(std::move(failed));
      }
    }
  }
  return out;
}

}  // namespace cordscan::classify
