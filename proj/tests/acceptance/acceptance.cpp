// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "cordscan/classify/repeated_split.hpp"
#include "cordscan/log.hpp"
#include "cordscan/parallel.hpp"
#include "cordscan/models/ballstick.hpp"
#include "cordscan/models/dti.hpp"
#include "cordscan/models/fit_volume.hpp"
#include "cordscan/phantom/cohort_design.hpp"
#include "cordscan/phantom/directions.hpp"
#include "cordscan/phantom/phantom.hpp"
#include "cordscan/rng.hpp"
#include "cordscan/stats/distributions.hpp"
#include "cordscan/stats/pooling.hpp"
#include "cordscan/stats/welch.hpp"
#include "support.hpp"

using namespace cordscan;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Eigen::Vector3d random_unit(CounterRng& rng) { return Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized(); }

Eigen::Matrix3d random_rotation(CounterRng& rng) {
  return Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized().toRotationMatrix();
}

Outcome model_round_trip() {
  const io::GradientScheme scheme = phantom::default_scheme();
  const models::BallStickFitter fitter(scheme);
  CounterRng rng(101);
  double worst_f = 0.0, worst_d = 0.0, worst_angle = 0.0;
  Stopwatch clock;
  for (int i = 0; i < 1000; ++i) {
    models::BallStickParams truth;
    truth.f = 0.9 * rng.uniform();
    truth.d = 0.4e-3 + 2.6e-3 * rng.uniform();
    truth.n = random_unit(rng);
    const auto [fit, diag] = fitter.fit(models::predict_ballstick(truth, scheme));
    worst_f = std::max(worst_f, std::fabs(fit.f - truth.f));
    worst_d = std::max(worst_d, std::fabs(fit.d - truth.d) / truth.d);
    worst_angle = std::max(worst_angle, models::axis_angle_degrees(fit.n, truth.n));
  }
  const double t = clock.seconds();
  return {worst_f <= 1e-4 && worst_d <= 1e-6 && worst_angle <= 0.1 && t < 5.0,
          fmt("1000 voxels, f in [0, 0.9], d in [0.4, 3.0] um^2/ms: max |df| %.2e (<= 1e-4), max rel dd %.2e "
              "(<= 1e-6), max angle %.2e deg (<= 0.1), %.2f s (< 5)",
              worst_f, worst_d, worst_angle, t)};
}

Outcome dti_oracle() {
  const io::GradientScheme scheme = phantom::default_scheme();
  const models::DtiFitter fitter(scheme);
  CounterRng rng(102);
  double worst_eig = 0.0, worst_rot = 0.0;
  bool md_exact = true;
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d l(0.1e-3 + 2.9e-3 * rng.uniform(), 0.1e-3 + 2.9e-3 * rng.uniform(), 0.1e-3 + 2.9e-3 * rng.uniform());
    std::sort(l.data(), l.data() + 3, std::greater<>());
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::Matrix3d d = r * l.asDiagonal() * r.transpose();
    const auto [fit, diag] = fitter.fit(models::predict_dti(models::DiffusionTensor::from_matrix(d, 800.0), scheme));
    const models::DtiMetrics m = models::dti_metrics(fit);
    for (int k = 0; k < 3; ++k) worst_eig = std::max(worst_eig, std::fabs(m.eigenvalues(k) - l(k)) / l(k));
    md_exact = md_exact && m.md == (m.ad + 2.0 * m.rd) / 3.0;

    const models::DtiMetrics a = models::dti_metrics(models::DiffusionTensor::from_matrix(l.asDiagonal()));
    const models::DtiMetrics b = models::dti_metrics(models::DiffusionTensor::from_matrix(d));
    worst_rot = std::max({worst_rot, std::fabs(a.fa - b.fa), std::fabs(a.md - b.md) / a.md,
                          std::fabs(a.ad - b.ad) / a.ad, std::fabs(a.rd - b.rd) / a.rd});
    md_exact = md_exact && b.md == (b.ad + 2.0 * b.rd) / 3.0;
  }
  return {worst_eig <= 1e-9 && worst_rot <= 1e-12 && md_exact,
          fmt("100 random tensors: max rel eigenvalue error %.2e (<= 1e-9), MD == (AD+2RD)/3 exactly: %s, "
              "max rotation change %.2e (<= 1e-12)",
              worst_eig, md_exact ? "yes" : "no", worst_rot)};
}

Outcome jacobian_check() {
  const io::GradientScheme scheme = phantom::default_scheme();
  CounterRng rng(103);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double theta = std::acos(2.0 * rng.uniform() - 1.0);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    models::BallStickParams p;
    p.f = 0.05 + 0.9 * rng.uniform();
    p.d = 0.3e-3 + 2.5e-3 * rng.uniform();
    p.n = models::direction_from_angles(theta, phi);
    const Eigen::MatrixXd j = models::ballstick_jacobian(p, scheme);
    const std::array<double, 4> x{p.f, p.d, theta, phi};
    const std::array<double, 4> h{1e-6, 1e-9, 1e-6, 1e-6};
    for (std::size_t k = 0; k < 4; ++k) {
      auto eval = [&](double delta) {
        auto y = x;
        y[k] += delta;
        models::BallStickParams q = p;
        q.f = y[0];
        q.d = y[1];
        q.n = models::direction_from_angles(y[2], y[3]);
        return models::predict_ballstick(q, scheme);
      };
      const Eigen::VectorXd fd = (eval(h[k]) - eval(-h[k])) / (2.0 * h[k]);
      const auto col = j.col(static_cast<Eigen::Index>(k));
      worst = std::max(worst, (col - fd).cwiseAbs().maxCoeff() / std::max(col.cwiseAbs().maxCoeff(), 1e-12));
    }
  }
  return {worst <= 1e-5, fmt("100 points x 4 parameters: max relative deviation %.2e (<= 1e-5)", worst)};
}

Outcome statistics_calibration() {
  Stopwatch clock;
  CounterRng rng(104);
  std::vector<double> p;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t na = 5 + rng.below(26);
    const std::size_t nb = 5 + rng.below(26);
    const double sb = 0.3 + 3.0 * rng.uniform();
    std::vector<double> a(na), b(nb);
    for (double& v : a) v = rng.normal(2.0, 1.0);
    for (double& v : b) v = rng.normal(2.0, sb);
    p.push_back(stats::welch(a, b).p);
  }
  std::sort(p.begin(), p.end());
  double ks = 0.0;
  const double n = static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    ks = std::max({ks, static_cast<double>(i + 1) / n - p[i], p[i] - static_cast<double>(i) / n});
  }
  double worst = 0.0;
  const auto rows = testing::read_oracle("t_cdf.csv");
  for (const auto& r : rows) {
    worst = std::max(worst, std::fabs(stats::t_cdf(testing::number(r[0]), testing::number(r[1])) - testing::number(r[2])));
  }
  const double t = clock.seconds();
  return {ks < 0.02 && worst <= 1e-12 && rows.size() == 1000 && t < 30.0,
          fmt("Welch null KS statistic %.4f (< 0.02, 1e4 draws); t_cdf max abs error %.2e over %zu oracle points "
              "(<= 1e-12); %.2f s (< 30)",
              ks, worst, rows.size(), t)};
}

Outcome roc_lda_oracle() {
  CounterRng rng(105);
  classify::FeatureMatrix f;
  f.x.resize(1000, 1);
  for (Eigen::Index i = 0; i < 1000; ++i) {
    const int label = i < 500 ? 0 : 1;
    f.y.push_back(label);
    f.x(i, 0) = rng.normal() + label;
  }
  classify::SplitOptions o;
  o.n_splits = 1000;
  o.seed = 7;
  o.threads = 1;
  const auto one = classify::repeated_split_auc(f, o);
  o.threads = 4;
  const auto four = classify::repeated_split_auc(f, o);
  const double theory = stats::normal_cdf(1.0 / std::numbers::sqrt2);
  const bool same = one.auc_mean == four.auc_mean && one.auc_std == four.auc_std;
  return {std::fabs(one.auc_mean - theory) <= 0.03 && same,
          fmt("auc_mean %.4f vs Phi(1/sqrt2) = %.4f (|diff| %.4f <= 0.03); 1 vs 4 threads identical: %s",
              one.auc_mean, theory, std::fabs(one.auc_mean - theory), same ? "yes" : "no")};
}

/// The default 25 + 25 cohort at Rician SNR 20, levels C2-C4.
const regions::CohortTable& phantom_cohort(double* seconds = nullptr) {
  static double elapsed = 0.0;
  static const regions::CohortTable table = [] {
    Stopwatch clock;
    phantom::CohortDesign d;
    auto t = testing::simulate_cohort(d, regions::default_cohort_levels(), default_thread_count());
    elapsed = clock.seconds();
    return t;
  }();
  if (seconds) *seconds = elapsed;
  return table;
}

Outcome phantom_directionality() {
  double build = 0.0;
  const regions::CohortTable& t = phantom_cohort(&build);
  Stopwatch clock;
  const auto v = regions::select_rows(t, regions::RowClass::V);
  const auto ms = regions::select_ms_rows(t, 0.10);
  // +1: higher in lesioned levels, -1: lower, 0: no significant difference.
  const std::map<Metric, int> expected{{Metric::Fww, 1}, {Metric::Md, 1}, {Metric::Rd, 1},
                                       {Metric::Fa, -1}, {Metric::StickAd, -1}, {Metric::Ad, 0}};
  bool pass = true;
  std::ostringstream detail;
  detail << v.size() << " V rows vs " << ms.size() << " MS(10%) rows;";
  for (Metric m : kAllMetrics) {
    std::vector<double> a, b;
    for (auto i : v) a.push_back(t.rows[i].metric(m));
    for (auto i : ms) b.push_back(t.rows[i].metric(m));
    const auto w = stats::welch(a, b);
    const int dir = expected.at(m);
    const bool ok = dir == 0 ? w.p >= 0.05 : (w.p < 0.05 && (w.mean_b - w.mean_a) * dir > 0.0);
    pass = pass && ok;
    detail << ' ' << display_name(m) << (w.mean_b > w.mean_a ? " up" : " down") << fmt(" p=%.2e", w.p)
           << (ok ? "" : " (unexpected)") << ';';
  }
  const double total = build + clock.seconds();
  pass = pass && total < 300.0;
  detail << fmt(" %.1f s (< 300)", total);
  return {pass, detail.str()};
}

Outcome combination_superiority() {
  const regions::CohortTable& t = phantom_cohort();
  classify::SplitOptions o;
  o.threads = default_thread_count();
  const std::vector<Metric> combo{Metric::Fww, Metric::StickAd, Metric::Md, Metric::Rd};
  const auto joint = classify::repeated_split_auc(classify::build_features(t, combo, 0.10), o);
  double best = 0.0;
  std::ostringstream detail;
  detail << fmt("FWW&STICK_AD&MD&RD auc %.4f; singletons:", joint.auc_mean);
  for (Metric m : combo) {
    const std::vector<Metric> single{m};
    const auto r = classify::repeated_split_auc(classify::build_features(t, single, 0.10), o);
    best = std::max(best, r.auc_mean);
    detail << ' ' << display_name(m) << fmt(" %.4f", r.auc_mean);
  }
  detail << fmt("; required >= %.4f", best - 0.02);
  return {joint.auc_mean >= best - 0.02, detail.str()};
}

Outcome pooling_report() {
  phantom::CohortDesign d;
  d.healthy = 12;
  d.patients = 0;
  d.large_rows = d.medium_rows = d.small_rows = 0;
  d.lesion_levels.clear();
  // C2-C4 homogeneous; C1 and C5-C7 offset by whole steps of (f, d).
  const std::array<int, 8> steps{0, 1, 0, 0, 0, -1, -2, -3};
  for (std::size_t l = 1; l <= 7; ++l) d.level_offset[l] = {0.015 * steps[l], 0.12e-3 * steps[l]};
  const std::vector<int> all{1, 2, 3, 4, 5, 6, 7};
  const auto t = testing::simulate_cohort(d, all, default_thread_count());
  std::vector<stats::LevelComparison> cmp;
  for (Metric m : kAllMetrics) cmp.push_back(stats::level_pooling(t, m));
  const auto report = stats::pooling_report(cmp);
  const auto pooled = report.pooled();
  std::ostringstream detail;
  detail << "intersection:";
  for (const auto& i : report.intersection) detail << ' ' << i.to_string();
  detail << "; pooled:";
  for (const auto& i : pooled) detail << ' ' << i.to_string();
  const bool pass = pooled.size() == 1 && pooled[0] == stats::LevelInterval{2, 4};
  detail << " (expected C2-C4)";
  return {pass, detail.str()};
}

struct VolumeRun {
  models::VolumeFitResult result;
  double seconds = 0.0;
};

VolumeRun fit_performance_volume(unsigned threads) {
  static const phantom::PhantomOutput p = [] {
    phantom::PhantomSpec spec;
    spec.noise = {phantom::NoiseModel::Rician, spec.s0 / 20.0};
    spec.seed = 9;
    return phantom::generate(spec);
  }();
  models::VolumeFitConfig config;
  config.threads = threads;
  Stopwatch clock;
  VolumeRun run{models::fit_volume(p.dwi, p.scheme, p.mask, config), 0.0};
  run.seconds = clock.seconds();
  return run;
}

VolumeRun& single_thread_run() {
  static VolumeRun run = fit_performance_volume(1);
  return run;
}

Outcome performance_single() {
  const VolumeRun& run = single_thread_run();
  return {run.seconds < 60.0,
          fmt("80x80x16x96 volume, %zu cord voxels: %.2f s on 1 thread (< 60)", run.result.fitted_voxels, run.seconds)};
}

Outcome performance_scaling() {
  const VolumeRun& one = single_thread_run();
  const VolumeRun four = fit_performance_volume(4);
  bool identical = one.result.maps.size() == four.result.maps.size();
  for (std::size_t i = 0; identical && i < one.result.maps.size(); ++i) {
    identical = one.result.maps[i].volume.data() == four.result.maps[i].volume.data();
  }
  const double speedup = one.seconds / four.seconds;
  return {speedup >= 3.0 && identical,
          fmt("4 threads: %.2f s, speedup %.2fx (>= 3) with %u hardware threads available; bitwise identical: %s",
              four.seconds, speedup, std::thread::hardware_concurrency(), identical ? "yes" : "no")};
}

struct Criterion {
  std::string id;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"1", "model round trip", model_round_trip},
      {"2", "tensor oracle", dti_oracle},
      {"3", "jacobian check", jacobian_check},
      {"4", "statistics calibration", statistics_calibration},
      {"5", "roc/lda oracle", roc_lda_oracle},
      {"6", "phantom effect directions", phantom_directionality},
      {"7", "combination superiority", combination_superiority},
      {"8", "pooling report", pooling_report},
      {"9a", "single-thread volume fit", performance_single},
      {"9b", "multi-thread scaling", performance_scaling},
  };

  CLI::App app{"cordscan acceptance criteria"};
  std::vector<std::string> selected;
  app.add_option("--criterion", selected, "criterion id (1-8, 9a, 9b); all when omitted");
  CLI11_PARSE(app, argc, argv);
  log::init_from_env();

  int failures = 0;
  bool matched = false;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    matched = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  if (!matched) {
    std::fprintf(stderr, "no criterion matches the selection\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
