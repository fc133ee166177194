// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "bell/experiment_sim.hpp"
#include "bell/strategy_search.hpp"
#include "bell/unified_space.hpp"

using namespace bell;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

ContextualModel bench_model() {
  Rng rng(derive_seed(7, 0));
  return random_model(Dimensions{4, 4, {4, 4}, {4, 4}}, rng);
}

void BM_ExpandedExpectation(benchmark::State& state) {
  const auto u = build_unified(bench_model());
  const auto exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expectation_unified(u, ContextIndex{0, 0}, Strategy::expanded, exec));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * u.size()));
}

void BM_FactorizedExpectation(benchmark::State& state) {
  const auto u = build_unified(bench_model());
  for (auto _ : state) {
    benchmark::DoNotOptimize(expectation_unified(u, ContextIndex{0, 0}, Strategy::factorized));
  }
}

void BM_EnumerateTables(benchmark::State& state) {
  SearchSpec spec;
  spec.dims = Dimensions{2, 2, {2, 2}, {2, 2}};
  const auto exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_deterministic(spec, exec).best_s_max);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) << 16);
}

void BM_SimulateTrials(benchmark::State& state) {
  const auto model = fixtures::m3();
  const auto exec = exec_of(state);
  constexpr std::uint64_t n = 1'000'000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_trials(model, n, SettingBias{}, 1, exec).counts);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(BM_ExpandedExpectation)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FactorizedExpectation)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EnumerateTables)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateTrials)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
