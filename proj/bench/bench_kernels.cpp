#include <benchmark/benchmark.h>

#include <random>

#include "towermpc/analysis.hpp"
#include "towermpc/prediction.hpp"

using namespace towermpc;

namespace {

const ModelGrid& grid() {
  static const ModelGrid g = build_default_grid(QlpvSetup::nominal());
  return g;
}

SchedulingSequence random_schedule(int np) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(grid().p_min(), grid().p_max());
  SchedulingSequence s;
  for (int i = 0; i < np; ++i) s.points.push_back(d(rng));
  return s;
}

std::vector<double> default_winds() {
  const QlpvSetup setup = QlpvSetup::nominal();
  std::vector<double> w;
  for (int i = 0; i <= 425; ++i) w.push_back(setup.wind_at(0.45 + 0.002 * i));
  return w;
}

void BM_BundleParallel(benchmark::State& st) {
  const auto s = random_schedule(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(build_prediction_bundle(grid(), 0.8, s));
}

void BM_BundleSerial(benchmark::State& st) {
  const auto s = random_schedule(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::build_prediction_bundle(grid(), 0.8, s));
}

void BM_GridParallel(benchmark::State& st) {
  const auto w = default_winds();
  for (auto _ : st) benchmark::DoNotOptimize(build_model_grid(QlpvSetup::nominal(), w, 1.0));
}

void BM_GridSerial(benchmark::State& st) {
  const auto w = default_winds();
  for (auto _ : st) benchmark::DoNotOptimize(reference::build_model_grid(QlpvSetup::nominal(), w, 1.0));
}

void BM_BodeParallel(benchmark::State& st) {
  const auto w = log_grid(1e-2, 1e1, std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(bode_demod_amplitude(TowerParams::nominal(), 0.5, w));
}

void BM_BodeSerial(benchmark::State& st) {
  const auto w = log_grid(1e-2, 1e1, std::size_t(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::bode_demod_amplitude(TowerParams::nominal(), 0.5, w));
}

}  // namespace

BENCHMARK(BM_BundleParallel)->Arg(25)->Arg(100);
BENCHMARK(BM_BundleSerial)->Arg(25)->Arg(100);
BENCHMARK(BM_GridParallel);
BENCHMARK(BM_GridSerial);
BENCHMARK(BM_BodeParallel)->Arg(500)->Arg(5000);
BENCHMARK(BM_BodeSerial)->Arg(500)->Arg(5000);

BENCHMARK_MAIN();
