#include <benchmark/benchmark.h>

#include <vector>

#include "dpsk/adversary.hpp"
#include "dpsk/optimize.hpp"
#include "dpsk/rates.hpp"
#include "dpsk/simulate.hpp"

using namespace dpsk;

namespace {

SystemParams long_distance(double length_km) {
  SystemParams p;
  p.detector = find_preset("long-distance");
  p.channel.fiber_length = length_km;
  return p;
}

}  // namespace

static void GateAcceptanceScan(benchmark::State& state) {
  const auto p = long_distance(105.0);
  for (auto _ : state) benchmark::DoNotOptimize(gate_acceptance(p));
}
BENCHMARK(GateAcceptanceScan);

static void QberModelCached(benchmark::State& state) {
  const auto p = long_distance(105.0);
  const auto acc = gate_acceptance(p);
  for (auto _ : state) benchmark::DoNotOptimize(rates::qber_model(p, acc));
}
BENCHMARK(QberModelCached);

static void OptimizeMu(benchmark::State& state) {
  const auto p = long_distance(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(opt::optimize_mu(p));
}
BENCHMARK(OptimizeMu)->Arg(20)->Arg(105);

static void DistanceSweep(benchmark::State& state) {
  const auto p = long_distance(0.0);
  std::vector<double> lengths;
  for (double L = 0; L <= 150; L += 1) lengths.push_back(L);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        opt::distance_sweep(p, lengths, true, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(DistanceSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void RunTrial(benchmark::State& state) {
  SystemParams p;
  p.channel.fiber_length = 20.0;
  const auto slots = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_trial(p, slots, 1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * slots));
}
BENCHMARK(RunTrial)->RangeMultiplier(10)->Range(100'000, 10'000'000)->Unit(benchmark::kMillisecond);

static void InterceptResend(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(eve::ir_attack(0.17, 1e-2, 0.05, 10'000'000, 1));
}
BENCHMARK(InterceptResend)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
