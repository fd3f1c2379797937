// Microbenchmarks for the hot paths: the per-step estimator update, full
// series estimation, path simulation, the correlation scan, event detection
// and the GARCH fit.
#include <benchmark/benchmark.h>

#include <rvol/benchmarks.hpp>
#include <rvol/event_study.hpp>
#include <rvol/reactive.hpp>
#include <rvol/simulation.hpp>

#include <vector>

namespace {

using namespace rvol;

PriceSeries sim_series(long n_steps, std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.n_steps = n_steps;
  cfg.seed = seed;
  return simulate_index(cfg);
}

void BM_update_index(benchmark::State& state) {
  const EstimatorParams params;
  const PriceSeries series = sim_series(2000);
  ReactiveState st = init_state(series.prices[0], params);
  std::size_t i = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_index(st, series.prices[i], params));
    if (++i == series.size()) i = 1;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_update_index);

void BM_estimate_index_vol(benchmark::State& state) {
  const EstimatorParams params;
  const PriceSeries series = sim_series(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_index_vol(series, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_estimate_index_vol)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_simulate_index(benchmark::State& state) {
  SimConfig cfg;
  cfg.n_steps = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_index(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_simulate_index)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_leverage_correlation(benchmark::State& state) {
  const PriceSeries series = sim_series(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(leverage_correlation(series, 40));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_leverage_correlation)->Arg(10000)->Arg(100000);

void BM_detect_events(benchmark::State& state) {
  const PriceSeries series = sim_series(state.range(0));
  const EstimatorParams params;
  const EstimateResult est = estimate_index_vol(series, params);
  const ReturnSeries rets = arithmetic_returns(series);
  for (auto _ : state)
    benchmark::DoNotOptimize(detect_events(rets, est.vols));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_detect_events)->Arg(10000)->Arg(100000);

void BM_garch_fit(benchmark::State& state) {
  const PriceSeries series = sim_series(state.range(0));
  const ReturnSeries rets = arithmetic_returns(series);
  for (auto _ : state) benchmark::DoNotOptimize(garch_fit(rets.returns));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_garch_fit)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
