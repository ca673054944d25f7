// Serial reference vs OpenMP kernels for a full session and for scoring.

#include <benchmark/benchmark.h>

#include "ktrack/metrics.hpp"
#include "ktrack/scheduler.hpp"
#include "ktrack/synthgen.hpp"
#include "ktrack/trackers.hpp"

using namespace ktrack;

namespace {

Dataset bench_dataset(int points) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::Sinusoidal;
  spec.frames = 200;
  spec.num_points = points;
  spec.bounds = {512, 512};
  spec.seed = 1;
  return generate(spec);
}

ExecutionPolicy policy_of(const benchmark::State& state) {
  return state.range(1) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
}

void BM_Session(benchmark::State& state) {
  const Dataset ds = bench_dataset(static_cast<int>(state.range(0)));
  const ScheduleConfig cfg{ds.frames(), 5, 3};
  for (auto _ : state) {
    OracleTracker oracle(ds, {.noise_std = 1.0, .seed = 1});
    auto r = run_session(oracle, ds, cfg, PredictorKind::FullKalman, {}, {policy_of(state)});
    benchmark::DoNotOptimize(r.samples);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * ds.frames());
}

void BM_Evaluate(benchmark::State& state) {
  const Dataset ds = bench_dataset(static_cast<int>(state.range(0)));
  OracleTracker oracle(ds, {.noise_std = 1.0, .seed = 1});
  const auto r = run_session(oracle, ds, {ds.frames(), 5, 3}, PredictorKind::FullKalman, {});
  for (auto _ : state) {
    auto m = evaluate(r, ds, policy_of(state));
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * ds.frames());
}

}  // namespace

BENCHMARK(BM_Session)->ArgsProduct({{100, 1000}, {0, 1}})->ArgNames({"points", "parallel"});
BENCHMARK(BM_Evaluate)->ArgsProduct({{100, 1000}, {0, 1}})->ArgNames({"points", "parallel"});

BENCHMARK_MAIN();
