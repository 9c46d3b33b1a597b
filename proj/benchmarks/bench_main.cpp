#include <benchmark/benchmark.h>

#include "bmdlimits/minimax.hpp"
#include "bmdlimits/parallel.hpp"
#include "bmdlimits/passive.hpp"
#include "bmdlimits/sim.hpp"
#include "bmdlimits/stats.hpp"
#include "bmdlimits/transaction_space.hpp"

using namespace bmdlimits;

static void BM_PoissonSf(benchmark::State& state) {
  const double mean = static_cast<double>(state.range(0));
  const auto k = static_cast<std::uint64_t>(mean * 1.05) + 1;
  for (auto _ : state) benchmark::DoNotOptimize(stats::poisson_sf({mean}, k));
}
BENCHMARK(BM_PoissonSf)->Arg(10)->Arg(2'000)->Arg(200'000);

static void BM_MinContestSize(benchmark::State& state) {
  const passive::PassiveDesign design{0.01, 0.07, 0.005, 0.05, 0.05};
  for (auto _ : state) benchmark::DoNotOptimize(passive::min_contest_size(design));
}
BENCHMARK(BM_MinContestSize);

static void BM_TablePassive(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(passive::table_passive(0.05, {0.01, 0.02, 0.03, 0.04, 0.05}, {0.07, 0.25},
                                                    {0.005, 0.01, 0.015}));
  }
}
BENCHMARK(BM_TablePassive)->Unit(benchmark::kMillisecond);

static void BM_OracleMinSamples(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parallel::oracle_min_samples({2980, 15, 0.95}));
}
BENCHMARK(BM_OracleMinSamples);

static void BM_HjwLowerBound(benchmark::State& state) {
  double n = 1e6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimax::hjw_lower_bound(n, 6.14e6, 1.0));
    n += 1.0;
  }
}
BENCHMARK(BM_HjwLowerBound);

static void BM_MinTrainingSample(benchmark::State& state) {
  minimax::MinimaxQuery q;
  q.alpha = 0.01;
  q.tests = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(minimax::min_training_sample(q));
}
BENCHMARK(BM_MinTrainingSample)->Unit(benchmark::kMicrosecond);

static void BM_ParallelSim(benchmark::State& state) {
  auto scenario = sim::parse_scenario(R"({
    "name": "bench", "seed": 1, "trials": 1000, "n_voters": 2980,
    "space": {"preset": "optimistic", "distribution": {"type": "uniform"}},
    "mallory": {"flip_prob": 0.5},
    "pat": {"mode": "uniform", "tests": 5}
  })");
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(scenario));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scenario.trials));
}
BENCHMARK(BM_ParallelSim)->Unit(benchmark::kMillisecond);

static void BM_PassiveSim(benchmark::State& state) {
  auto scenario = sim::parse_scenario(R"({
    "name": "bench", "seed": 1, "trials": 1000, "n_voters": 50000,
    "space": {"preset": "optimistic", "distribution": {"type": "uniform"}},
    "mallory": {"flip_prob": 0.025},
    "passive": {"detect_rate": 0.25, "base_rate": 0.005, "alarm_threshold": 277}
  })");
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(scenario));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scenario.trials));
}
BENCHMARK(BM_PassiveSim)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
