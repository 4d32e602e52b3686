#include <benchmark/benchmark.h>

#include "rsi/chain.hpp"
#include "rsi/instance.hpp"
#include "rsi/scorer.hpp"
#include "rsi/simulator.hpp"

namespace {

rsi::ProgramSpace instance(unsigned l) {
  rsi::GenConfig cfg;
  cfg.l = l;
  cfg.seed = 1;
  return rsi::generate_random_instance(cfg);
}

void BM_Generate(benchmark::State& state) {
  rsi::GenConfig cfg;
  cfg.l = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    cfg.seed++;
    benchmark::DoNotOptimize(rsi::generate_random_instance(cfg));
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << cfg.l));
}
BENCHMARK(BM_Generate)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

void BM_ConsistentScores(benchmark::State& state) {
  const auto space = instance(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rsi::consistent_scores(space));
  state.SetComplexityN(static_cast<std::int64_t>(space.total_support()));
}
BENCHMARK(BM_ConsistentScores)->DenseRange(8, 18, 2)->Unit(benchmark::kMillisecond)->Complexity();

void BM_HittingTimesDirect(benchmark::State& state) {
  const auto space = instance(static_cast<unsigned>(state.range(0)));
  const auto chain = rsi::build_transition(space, rsi::consistent_scores(space));
  for (auto _ : state) benchmark::DoNotOptimize(rsi::hitting_times_exact(chain, space.optimal()));
}
BENCHMARK(BM_HittingTimesDirect)->DenseRange(6, 11, 1)->Unit(benchmark::kMillisecond);

void BM_RunRsi(benchmark::State& state) {
  const auto space = instance(static_cast<unsigned>(state.range(0)));
  const auto table = rsi::consistent_scores(space);
  const rsi::ProgramSampler sampler(space);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rsi::run_rsi(space, sampler, table, 0, seed++, 100000));
  }
}
BENCHMARK(BM_RunRsi)->DenseRange(8, 16, 4);

}  // namespace

BENCHMARK_MAIN();
