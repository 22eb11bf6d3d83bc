#include <doctest.h>

#include "predlearn/migration.hpp"
#include "predlearn/stream.hpp"

#include <cmath>
#include <sstream>

using namespace predlearn;
using namespace predlearn::migration;

namespace {

MetricSpace line_metric(int k, double spacing = 1.0) {
  std::vector<std::vector<double>> d(k, std::vector<double>(k));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) d[a][b] = spacing * std::abs(a - b);
  return MetricSpace(std::move(d));
}

double brute_force_opt(const MetricSpace& metric, const MigrationProblem& problem) {
  const int n = problem.length();
  const int k = metric.points();
  std::vector<int> states(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, trajectory_cost(metric, problem.requests, states,
                                          problem.migration_factor));
    int j = n - 1;
    while (j >= 0 && states[j] == k - 1) states[j--] = 0;
    if (j < 0) break;
    states[j]++;
  }
  return best;
}

}  // namespace

TEST_CASE("metric validation rejects broken matrices") {
  using Matrix = std::vector<std::vector<double>>;
  CHECK_THROWS_AS(MetricSpace(Matrix{{0.0, 1.0}, {2.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MetricSpace(Matrix{{1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MetricSpace(Matrix{{0.0, -1.0}, {-1.0, 0.0}}), std::invalid_argument);
  // d(0,2) = 5 > d(0,1) + d(1,2) = 2 breaks the triangle inequality.
  CHECK_THROWS_AS(
      MetricSpace(Matrix{{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}}),
      std::invalid_argument);
  CHECK(line_metric(4).points() == 4);
}

TEST_CASE("offline_opt on hand-checked cases") {
  const MetricSpace single = line_metric(1);
  MigrationProblem p;
  p.requests = {0, 0, 0, 0};
  p.migration_factor = 2.0;
  p.gamma = 0.5;
  CHECK(offline_opt(single, p).total_cost == doctest::Approx(0.0));

  // A huge migration factor forces a constant trajectory at the 1-median.
  const MetricSpace three = line_metric(3);
  MigrationProblem heavy;
  heavy.requests = {0, 2, 1, 1, 0, 1};
  heavy.migration_factor = 1000.0;
  heavy.gamma = 0.002;  // window 2
  const Trajectory t = offline_opt(three, heavy);
  double best_constant = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    double cost = 0.0;
    for (int s : heavy.requests) cost += three.d(a, s);
    best_constant = std::min(best_constant, cost);
  }
  CHECK(t.total_cost == doctest::Approx(best_constant));
  for (std::size_t j = 1; j < t.states.size(); ++j) CHECK(t.states[j] == t.states[0]);
}

TEST_CASE("offline_opt equals trajectory enumeration on small instances") {
  Rng rng(4040);
  for (int it = 0; it < 40; ++it) {
    const int k = 2 + static_cast<int>(rng.uniform_below(2));
    const int n = 3 + static_cast<int>(rng.uniform_below(4));
    const MetricSpace metric = line_metric(k, 0.5 + rng.uniform01());
    MigrationProblem p;
    p.requests.resize(n);
    for (int& s : p.requests) s = static_cast<int>(rng.uniform_below(k));
    p.migration_factor = 2.5 + 3.0 * rng.uniform01();
    p.gamma = 2.0 / p.migration_factor;  // window 2
    const Trajectory t = offline_opt(metric, p);
    CHECK(t.total_cost == doctest::Approx(brute_force_opt(metric, p)));
    CHECK(trajectory_cost(metric, p.requests, t.states, p.migration_factor) ==
          doctest::Approx(t.total_cost));
  }
}

TEST_CASE("offline_opt lower-bounds random trajectories") {
  Rng rng(5050);
  const MetricSpace metric = line_metric(4, 0.7);
  MigrationProblem p;
  p.requests.resize(12);
  for (int& s : p.requests) s = static_cast<int>(rng.uniform_below(4));
  p.migration_factor = 3.0;
  p.gamma = 1.0 / 3.0;  // window 1
  const double opt = offline_opt(metric, p).total_cost;
  for (int it = 0; it < 1000; ++it) {
    std::vector<int> states(12);
    for (int& s : states) s = static_cast<int>(rng.uniform_below(4));
    CHECK(opt <= trajectory_cost(metric, p.requests, states, p.migration_factor) + 1e-12);
  }
}

TEST_CASE("lazy_predicted_run executes the planned trajectory") {
  const MetricSpace metric = line_metric(3);
  MigrationProblem p;
  p.requests = {0, 1, 2, 2, 1, 0};
  p.migration_factor = 2.0;
  p.gamma = 0.5;

  CHECK(lazy_predicted_run(metric, p, p.requests) ==
        doctest::Approx(offline_opt(metric, p).total_cost));

  const MetricSpace single = line_metric(1);
  MigrationProblem trivial;
  trivial.requests = {0, 0, 0};
  trivial.migration_factor = 2.0;
  trivial.gamma = 0.5;
  const std::vector<int> zeros3{0, 0, 0};
  CHECK(lazy_predicted_run(single, trivial, zeros3) == doctest::Approx(0.0));

  // Adversarially wrong predictions on a 2-point metric never beat the optimum.
  const MetricSpace two = line_metric(2);
  MigrationProblem adv;
  adv.requests = {0, 0, 0, 0, 1, 1, 1, 1};
  adv.migration_factor = 2.0;
  adv.gamma = 0.5;
  std::vector<int> wrong = {1, 1, 1, 1, 0, 0, 0, 0};
  const double realized = lazy_predicted_run(two, adv, wrong);
  CHECK(realized >= offline_opt(two, adv).total_cost - 1e-12);

  const std::vector<int> short_pred{0, 1};
  CHECK_THROWS_AS(lazy_predicted_run(two, adv, short_pred), std::invalid_argument);
}

TEST_CASE("mistake_fraction on the stated windows") {
  const std::vector<int> a{0, 1, 2, 3};
  CHECK(mistake_fraction(a, a, 2) == doctest::Approx(0.0));
  const std::vector<int> b{1, 2, 3, 0};
  CHECK(mistake_fraction(a, b, 2) == doctest::Approx(1.0));
  // mismatch pattern (1,0,0,1): the worst window of length 2 holds one mismatch
  const std::vector<int> c{9, 1, 2, 9};
  CHECK(mistake_fraction(c, a, 2) == doctest::Approx(0.5));
}

TEST_CASE("window_loss on the stated cases and its subgradient by differences") {
  PredictionStack hot;
  hot.rows = {learners::SimplexPoint::one_hot(2, 0),
              learners::SimplexPoint::one_hot(2, 1)};
  CHECK(window_loss(hot, std::vector<int>{0, 1}, 2) == doctest::Approx(0.0));

  const PredictionStack uniform = PredictionStack::uniform(2, 2);
  CHECK(window_loss(uniform, std::vector<int>{0, 1}, 2) == doctest::Approx(1.0));

  // Finite differences at a stack with a unique maximizing window.
  PredictionStack p = PredictionStack::uniform(6, 3);
  p.rows[1].weights = {0.7, 0.2, 0.1};
  p.rows[2].weights = {0.1, 0.8, 0.1};
  p.rows[4].weights = {0.25, 0.7, 0.05};
  const std::vector<int> requests{0, 2, 0, 1, 2, 2};
  const auto grad = window_loss_subgradient(p, requests, 2);
  const double h = 1e-7;
  for (int j = 0; j < 6; ++j) {
    for (int c = 0; c < 3; ++c) {
      PredictionStack up = p, down = p;
      up.rows[j].weights[c] += h;
      down.rows[j].weights[c] -= h;
      const double fd =
          (window_loss(up, requests, 2) - window_loss(down, requests, 2)) / (2.0 * h);
      CHECK(fd == doctest::Approx(grad[j][c]).epsilon(1e-6));
    }
  }
}

TEST_CASE("window_loss is convex along random chords") {
  Rng rng(6060);
  for (int it = 0; it < 1000; ++it) {
    const int n = 4 + static_cast<int>(rng.uniform_below(5));
    const int k = 2 + static_cast<int>(rng.uniform_below(3));
    const int window = 1 + static_cast<int>(rng.uniform_below(n));
    std::vector<int> requests(n);
    for (int& s : requests) s = static_cast<int>(rng.uniform_below(k));
    PredictionStack a = PredictionStack::uniform(n, k), b = a;
    for (int j = 0; j < n; ++j) {
      a.rows[j] = learners::SimplexPoint(harness::random_simplex_point(k, rng));
      b.rows[j] = learners::SimplexPoint(harness::random_simplex_point(k, rng));
    }
    const double lambda = rng.uniform01();
    PredictionStack mix = a;
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < k; ++c)
        mix.rows[j].weights[c] =
            lambda * a.rows[j].weights[c] + (1.0 - lambda) * b.rows[j].weights[c];
    CHECK(window_loss(mix, requests, window) <=
          lambda * window_loss(a, requests, window) +
              (1.0 - lambda) * window_loss(b, requests, window) + 1e-9);
  }
}

TEST_CASE("lambert_w inverts w * exp(w)") {
  CHECK(lambert_w(0.0) == 0.0);
  CHECK(lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lambert_w(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-12));
  CHECK_THROWS_AS(lambert_w(-0.1), std::invalid_argument);

  Rng rng(7070);
  for (int it = 0; it < 1000; ++it) {
    const double v = std::exp(rng.uniform_real(-8.0, 8.0));
    const double w = lambert_w(v);
    CHECK(std::fabs(w * std::exp(w) - v) <= 1e-12 * std::max(1.0, v));
  }
}

TEST_CASE("mistake_bound values and the linear relaxation") {
  CHECK(mistake_bound(0.0, 20, 4).f_value == 0.0);

  // Single window: the log term vanishes and t = 1.
  const auto degenerate = mistake_bound(2.5, 8, 8);
  CHECK(degenerate.f_value ==
        doctest::Approx(2.5 * (std::exp(1.0) - 1.0) / 8.0));

  for (int i = 1; i <= 1000; ++i) {
    const double u = 0.1 * i;
    const auto b = mistake_bound(u, 40, 4);
    CHECK(b.f_value <= b.linear_value + 1e-12);
  }
}

TEST_CASE("sample_predictions is categorical per slot") {
  PredictionStack hot;
  hot.rows = {learners::SimplexPoint::one_hot(3, 2),
              learners::SimplexPoint::one_hot(3, 0)};
  Rng rng(1);
  CHECK(sample_predictions(hot, rng) == std::vector<int>{2, 0});

  PredictionStack uniform = PredictionStack::uniform(1, 2);
  Rng rng2(2);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += sample_predictions(uniform, rng2)[0];
  const double sigma = std::sqrt(10000 * 0.25);
  CHECK(std::fabs(ones - 5000.0) <= 3.0 * sigma);

  PredictionStack empty;
  CHECK_THROWS_AS(sample_predictions(empty, rng), std::invalid_argument);
}

TEST_CASE("per-timestep EG learner converges on constant streams and meets its bound") {
  Rng rng(8080);
  const harness::MigrationStreamParams params{8, 3, 4.0, 0.5, 1.0};
  const auto stream = harness::migration_stream(harness::StreamKind::iid, 1500,
                                                params, rng);
  const auto result =
      eg_sequence_learner(stream.request_sequences, stream.metric, 4.0, 0.5);
  CHECK(learners::regret_report(result.ledger).satisfied);

  // With stickiness 1.0 every round repeats the base pattern, so the learned
  // rows concentrate on it and the final per-round loss collapses.
  for (int j = 0; j < 8; ++j) {
    const auto& w = result.final_stack.rows[j].weights;
    CHECK(*std::max_element(w.begin(), w.end()) > 0.75);
  }
  CHECK(result.ledger.rounds.back().loss < 0.5);

  // One-round streams satisfy the bound trivially.
  const std::vector<std::vector<int>> single{stream.request_sequences.front()};
  const auto tiny = eg_sequence_learner(single, stream.metric, 4.0, 0.5);
  CHECK(learners::regret_report(tiny.ledger).satisfied);
}

TEST_CASE("per-timestep EG learner meets its bound on drifting streams") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(42, seed));
    harness::MigrationStreamParams params;
    params.sequence_length = 10;
    params.points = 4;
    params.migration_factor = 4.0;
    params.gamma = 0.5;
    const auto stream = harness::migration_stream(harness::StreamKind::drifting,
                                                  120, params, rng);
    const auto result =
        eg_sequence_learner(stream.request_sequences, stream.metric, 4.0, 0.5);
    CHECK(learners::regret_report(result.ledger).satisfied);
  }
}

TEST_CASE("metric and request files round-trip") {
  // A Euclidean metric with non-representable distances must survive the
  // text format bit for bit.
  Rng mrng(909);
  const auto generated =
      harness::migration_stream(harness::StreamKind::iid, 1, {4, 5, 8.0, 0.5, 0.8}, mrng);
  std::stringstream buf;
  write_metric(buf, generated.metric);
  const MetricSpace back = read_metric(buf);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) CHECK(back.d(a, b) == generated.metric.d(a, b));

  const std::vector<std::vector<int>> sequences{{0, 1, 2}, {2, 2}};
  std::stringstream rbuf;
  write_request_sequences(rbuf, sequences);
  CHECK(read_request_sequences(rbuf) == sequences);
}
