#include <benchmark/benchmark.h>

#include <vector>

#include "frechetcp/inference.hpp"
#include "frechetcp/scan.hpp"
#include "frechetcp/simulation.hpp"

using namespace frechetcp;

namespace {

ObjectSequence distribution_sequence(std::size_t n, std::size_t grid) {
  ScenarioSpec spec;
  spec.family = Family::wasserstein_location;
  spec.param = 0.5;
  spec.n1 = n / 3;
  spec.n2 = n - n / 3;
  spec.shape = grid;
  spec.seed = 1;
  return gen_sequence(spec);
}

void BM_ScanWasserstein(benchmark::State& state) {
  const auto seq = distribution_sequence(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(scan_max(seq, 0.1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ScanWasserstein)->RangeMultiplier(2)->Range(64, 2048)->Complexity();

void BM_ScanProfile(benchmark::State& state) {
  const auto seq = distribution_sequence(300, 100);
  for (auto _ : state) benchmark::DoNotOptimize(scan(seq, 0.1));
}
BENCHMARK(BM_ScanProfile);

void BM_ScanNetworks(benchmark::State& state) {
  ScenarioSpec spec;
  spec.family = Family::ba_network;
  spec.param = 2.0;
  spec.shape = static_cast<std::size_t>(state.range(0));
  const auto seq = gen_sequence(spec);
  for (auto _ : state) benchmark::DoNotOptimize(scan_max(seq, 0.1));
}
BENCHMARK(BM_ScanNetworks)->Arg(10)->Arg(40);

void BM_Bootstrap(benchmark::State& state) {
  const auto seq = distribution_sequence(300, 100);
  CalibrationConfig config;
  config.num_replicates = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_critical_value(seq, config));
}
BENCHMARK(BM_Bootstrap)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_BridgeNull(benchmark::State& state) {
  CalibrationConfig config;
  config.method = CalibrationMethod::asymptotic;
  config.num_replicates = 10000;
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_null(300, config));
}
BENCHMARK(BM_BridgeNull)->Unit(benchmark::kMillisecond);

void BM_GenerateNetworks(benchmark::State& state) {
  ScenarioSpec spec;
  spec.family = Family::ba_network;
  spec.param = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(gen_sequence(spec));
}
BENCHMARK(BM_GenerateNetworks)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
