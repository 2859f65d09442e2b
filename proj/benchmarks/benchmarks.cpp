#include <benchmark/benchmark.h>

#include "cordscan/classify/repeated_split.hpp"
#include "cordscan/models/ballstick.hpp"
#include "cordscan/models/fit_volume.hpp"
#include "cordscan/phantom/directions.hpp"
#include "cordscan/phantom/phantom.hpp"
#include "cordscan/rng.hpp"
#include "cordscan/stats/distributions.hpp"

using namespace cordscan;

static void BM_FitBallStickVoxel(benchmark::State& state) {
  const io::GradientScheme scheme = phantom::default_scheme();
  models::BallStickParams truth;
  truth.f = 0.16;
  truth.d = 1.14e-3;
  truth.n = Eigen::Vector3d(0.3, 0.9, 0.1).normalized();
  CounterRng rng(1);
  Eigen::VectorXd y = models::predict_ballstick(truth, scheme);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = phantom::add_noise(y(i), {phantom::NoiseModel::Rician, 0.05}, rng);
  const models::BallStickFitter fitter(scheme);
  for (auto _ : state) benchmark::DoNotOptimize(fitter.fit(y));
}
BENCHMARK(BM_FitBallStickVoxel);

static void BM_FitVolume(benchmark::State& state) {
  phantom::PhantomSpec spec;
  spec.dims = {24, 80, 16};
  spec.noise = {phantom::NoiseModel::Rician, 50.0};
  const phantom::PhantomOutput p = phantom::generate(spec);
  models::VolumeFitConfig config;
  config.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(models::fit_volume(p.dwi, p.scheme, p.mask, config));
}
BENCHMARK(BM_FitVolume)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_StudentizedRange(benchmark::State& state) {
  double q = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::studentized_range_sf(q, 7.0, 60.0));
    q = q > 6.0 ? 1.0 : q + 0.37;
  }
}
BENCHMARK(BM_StudentizedRange)->Unit(benchmark::kMicrosecond);

static void BM_RepeatedSplit(benchmark::State& state) {
  CounterRng rng(2);
  classify::FeatureMatrix f;
  f.x.resize(120, 4);
  for (Eigen::Index i = 0; i < f.x.rows(); ++i) {
    f.y.push_back(i < 60 ? 0 : 1);
    for (Eigen::Index j = 0; j < 4; ++j) f.x(i, j) = rng.normal(i < 60 ? 0.0 : 0.5, 1.0);
  }
  classify::SplitOptions options;
  options.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(classify::repeated_split_auc(f, options));
}
BENCHMARK(BM_RepeatedSplit)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_MAIN();
