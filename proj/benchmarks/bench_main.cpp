#include <benchmark/benchmark.h>

#include <cmath>

#include "persist/persist.hpp"

namespace {

persist::ModelParams example(double p) {
  const double s = std::sqrt(21.0);
  return persist::validate({(s + 3.0) / 4.0, 0.5, (s - 3.0) / 4.0, 0.5, 0.5, p});
}

persist::ModelParams figure(double p) { return persist::validate({3.7, 0.01, 0.01, 0.025, 0.025, p}); }

void BM_Flow(benchmark::State& state) {
  const persist::MeanField mf(example(0.5));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mf.flow(t));
    t = t < 10.0 ? t + 0.01 : 0.0;
  }
}
BENCHMARK(BM_Flow);

void BM_MomentMatrix(benchmark::State& state) {
  const persist::MeanField mf(figure(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(mf.moment(0.3));
}
BENCHMARK(BM_MomentMatrix);

void BM_CriticalTime(benchmark::State& state) {
  const persist::ModelParams params = figure(static_cast<double>(state.range(0)) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(persist::critical_time(params));
}
BENCHMARK(BM_CriticalTime)->Arg(5)->Arg(50)->Arg(100);

void BM_SweepLambdaP(benchmark::State& state) {
  const std::vector<persist::SweepAxis> axes{{persist::SweepVar::Lambda, persist::linspace(0.5, 5.0, 46)},
                                             {persist::SweepVar::P, {0.9, 0.95, 1.0}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(persist::sweep(figure(1.0).raw(), axes, persist::kDefaultTimeTolerance, 1));
  }
}
BENCHMARK(BM_SweepLambdaP)->Unit(benchmark::kMillisecond);

void BM_TrajectoryAboveCritical(benchmark::State& state) {
  const persist::ModelParams params = example(1.0);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    persist::Engine engine = persist::make_engine(1, trial++);
    benchmark::DoNotOptimize(persist::run(params, persist::Periodic{3.0}, {0, 1, 0.0}, {}, engine));
  }
}
BENCHMARK(BM_TrajectoryAboveCritical)->Unit(benchmark::kMicrosecond);

void BM_Lyapunov(benchmark::State& state) {
  const persist::ModelParams params = figure(0.5);
  persist::LyapunovOptions opt;
  opt.epochs = static_cast<std::size_t>(state.range(0));
  opt.replicates = 8;
  opt.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(persist::lyapunov(params, persist::EnvFamily::exponential(0.17), opt));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 8);
}
BENCHMARK(BM_Lyapunov)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
