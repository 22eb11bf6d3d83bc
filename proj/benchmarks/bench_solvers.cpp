#include <benchmark/benchmark.h>

#include "predlearn/matching.hpp"
#include "predlearn/migration.hpp"
#include "predlearn/scheduling.hpp"
#include "predlearn/stream.hpp"

using namespace predlearn;

namespace {

matching::BipartiteInstance random_complete(int side, long long cap, Rng& rng) {
  matching::BipartiteInstance g;
  g.n_left = g.n_right = side;
  for (int u = 0; u < side; ++u)
    for (int v = 0; v < side; ++v)
      g.edges.push_back({u, v, rng.uniform_int(0, cap)});
  return g;
}

void BM_HungarianCold(benchmark::State& state) {
  Rng rng(1);
  const auto g = random_complete(static_cast<int>(state.range(0)), 100, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(matching::hungarian_solve(g).objective);
}
BENCHMARK(BM_HungarianCold)->Arg(10)->Arg(25)->Arg(50);

void BM_HungarianWarm(benchmark::State& state) {
  Rng rng(1);
  const auto g = random_complete(static_cast<int>(state.range(0)), 100, rng);
  const auto cold = matching::hungarian_solve(g);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        matching::warmstart_solve(g, cold.optimal_duals).objective);
}
BENCHMARK(BM_HungarianWarm)->Arg(10)->Arg(25)->Arg(50);

void BM_MigrationOfflineOpt(benchmark::State& state) {
  Rng rng(2);
  harness::MigrationStreamParams params;
  params.sequence_length = static_cast<int>(state.range(0));
  params.points = 8;
  const auto stream = harness::migration_stream(harness::StreamKind::iid, 1,
                                                params, rng);
  migration::MigrationProblem p;
  p.requests = stream.request_sequences.front();
  p.migration_factor = 8.0;
  p.gamma = 0.5;
  for (auto _ : state)
    benchmark::DoNotOptimize(migration::offline_opt(stream.metric, p).total_cost);
}
BENCHMARK(BM_MigrationOfflineOpt)->Arg(20)->Arg(100)->Arg(400);

void BM_RoundRobinSimulate(benchmark::State& state) {
  Rng rng(3);
  const auto inst =
      harness::random_rr_instance(static_cast<int>(state.range(0)), 10.0, 1.0, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(scheduling::rr_simulate(inst, 0.3));
}
BENCHMARK(BM_RoundRobinSimulate)->Arg(10)->Arg(50)->Arg(200);

void BM_FractionalOpt(benchmark::State& state) {
  Rng rng(4);
  const auto inst = harness::planted_assignment_instance(
      static_cast<int>(state.range(0)), 3, 2.0, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(scheduling::offline_fractional_opt(inst));
}
BENCHMARK(BM_FractionalOpt)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
