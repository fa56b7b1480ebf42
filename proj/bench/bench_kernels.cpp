#include <benchmark/benchmark.h>

#include "ammhl/hedging.hpp"
#include "ammhl/liquidity_opt.hpp"
#include "ammhl/market_dynamics.hpp"
#include "ammhl/noise_flow.hpp"

using namespace ammhl;

namespace {

MarketModel model() {
  MarketModel m;
  m.sigma = 0.1;
  return m;
}

SimGrid grid(std::size_t paths) {
  SimGrid g;
  g.n_paths = paths;
  g.n_steps = 1000;
  return g;
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_SimulatePaths(benchmark::State& state) {
  const SimGrid g = grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(model(), g, 100.0, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}

void BM_HedgeNoTransient(benchmark::State& state) {
  const SimGrid g = grid(static_cast<std::size_t>(state.range(0)));
  const PathBundle paths = simulate_paths(model(), g, 100.0);
  HedgeParams hp;
  for (auto _ : state) benchmark::DoNotOptimize(hedge_path_no_transient(paths, 100.0, hp, model(), exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}

void BM_FeeAccrual(benchmark::State& state) {
  const SimGrid g = grid(static_cast<std::size_t>(state.range(0)));
  const PathBundle paths = simulate_paths(model(), g, 100.0);
  const FlowParams flow = FlowParams::from_gamma(0.2, 0.003);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_fee_accrual(paths, flow, 100.0, 0, exec_of(state)));
}

void BM_ObjectiveCurve(benchmark::State& state) {
  StageOneInputs in;
  in.model = model();
  in.flow = FlowParams::from_gamma(0.2, 0.003);
  std::vector<double> ks;
  for (int k = 0; k < 21; ++k) ks.push_back(1000.0 * k);
  const SimGrid g = grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mc_objective_curve(ks, in, g, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_SimulatePaths)->Args({2000, 0})->Args({2000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HedgeNoTransient)->Args({2000, 0})->Args({2000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeeAccrual)->Args({2000, 0})->Args({2000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ObjectiveCurve)->Args({500, 0})->Args({500, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
