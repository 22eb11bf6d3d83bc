#include <benchmark/benchmark.h>

#include "predlearn/learners.hpp"
#include "predlearn/skirental.hpp"
#include "predlearn/stream.hpp"

using namespace predlearn;

namespace {

void BM_OgdStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto box = learners::BoxDomain::centered_cube(d, 5.0);
  Rng rng(1);
  Vec x(d, 0.0), g(d);
  for (double& v : g) v = rng.uniform_real(-1.0, 1.0);
  for (auto _ : state) {
    x = learners::ogd_step(x, g, 0.01, box);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_OgdStep)->Arg(16)->Arg(256)->Arg(4096);

void BM_EgStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(2);
  learners::SimplexPoint p = learners::SimplexPoint::uniform(d);
  Vec g(d);
  for (double& v : g) v = rng.uniform_real(-1.0, 1.0);
  for (auto _ : state) {
    p = learners::eg_step(p, g, 0.01);
    benchmark::DoNotOptimize(p.weights.data());
  }
}
BENCHMARK(BM_EgStep)->Arg(16)->Arg(256)->Arg(4096);

void BM_KtocoStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  Vec g(d);
  for (double& v : g) v = rng.uniform_real(-1.0, 1.0);
  const double norm = l2_norm(g);
  for (double& v : g) v /= norm;
  learners::CoinBettingState s(d);
  for (auto _ : state) {
    auto [next, point] = learners::ktoco_step(std::move(s), g);
    s = std::move(next);
    benchmark::DoNotOptimize(point.data());
  }
}
BENCHMARK(BM_KtocoStep)->Arg(16)->Arg(256)->Arg(4096);

void BM_DiscreteGridRound(benchmark::State& state) {
  // One full learner pass over a short season stream, dominated by the
  // product-grid update.
  const int rounds = static_cast<int>(state.range(0));
  Rng stream_rng(4);
  harness::SkiStreamParams params;
  const auto seasons =
      harness::ski_stream(harness::StreamKind::iid, rounds, params, stream_rng);
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(
        skirental::discrete_grid_learner(seasons, 20, 10.0, rng)
            .ledger.comparator_loss);
  }
}
BENCHMARK(BM_DiscreteGridRound)->Arg(50)->Arg(200);

}  // namespace
