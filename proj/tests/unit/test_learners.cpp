#include <doctest.h>

#include "predlearn/learners.hpp"
#include "predlearn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace predlearn;
using namespace predlearn::learners;

namespace {

double l1_loss(const Vec& x, const Vec& target, const Vec* weights = nullptr) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += (weights ? (*weights)[i] : 1.0) * std::fabs(x[i] - target[i]);
  return s;
}

double linf_loss(const Vec& x, const Vec& target) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s = std::max(s, std::fabs(x[i] - target[i]));
  return s;
}

Vec random_vec(Rng& rng, int d, double lo, double hi) {
  Vec v(d);
  for (double& x : v) x = rng.uniform_real(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("ogd_step hand-checked examples") {
  const BoxDomain box = BoxDomain::centered_cube(1, 1.0);
  CHECK(ogd_step(Vec{0.0}, Vec{2.0}, 0.25, box)[0] == doctest::Approx(-0.5));
  CHECK(ogd_step(Vec{0.9}, Vec{-1.0}, 0.5, box)[0] == doctest::Approx(1.0));
  const Vec x{0.3};
  CHECK(ogd_step(x, Vec{0.0}, 0.1, box)[0] == doctest::Approx(0.3));
}

TEST_CASE("ogd_step rejects bad inputs") {
  const BoxDomain box = BoxDomain::centered_cube(2, 1.0);
  CHECK_THROWS_AS(ogd_step(Vec{0.0}, Vec{1.0, 2.0}, 0.1, box), std::invalid_argument);
  CHECK_THROWS_AS(ogd_step(Vec{0.0, 0.0}, Vec{1.0, 2.0}, 0.0, box),
                  std::invalid_argument);
  CHECK_THROWS_AS(ogd_step(Vec{0.0, 0.0}, Vec{1.0, std::nan("")}, 0.1, box),
                  std::invalid_argument);
}

TEST_CASE("projection is idempotent on random boxes") {
  Rng rng(42);
  for (int it = 0; it < 10000; ++it) {
    const int d = 1 + static_cast<int>(rng.uniform_below(6));
    Vec lo = random_vec(rng, d, -5.0, 0.0);
    Vec hi = random_vec(rng, d, 0.0, 5.0);
    const BoxDomain box(lo, hi);
    const Vec x = random_vec(rng, d, -10.0, 10.0);
    const Vec once = box.project(x);
    const Vec twice = box.project(once);
    CHECK(once == twice);
    CHECK(box.contains(once));
  }
}

TEST_CASE("eg_step hand-checked examples") {
  const SimplexPoint half = SimplexPoint(Vec{0.5, 0.5});
  const SimplexPoint same = eg_step(half, Vec{0.0, 0.0}, 1.0);
  CHECK(same.weights[0] == doctest::Approx(0.5));

  const SimplexPoint moved = eg_step(half, Vec{1.0, 0.0}, std::log(2.0));
  CHECK(moved.weights[0] == doctest::Approx(1.0 / 3.0));
  CHECK(moved.weights[1] == doctest::Approx(2.0 / 3.0));

  const SimplexPoint hot = SimplexPoint::one_hot(2, 0);
  const SimplexPoint still = eg_step(hot, Vec{-3.0, 5.0}, 0.7);
  CHECK(still.weights[0] == doctest::Approx(1.0));
  CHECK(still.weights[1] == 0.0);

  CHECK_THROWS_AS(eg_step(half, Vec{std::nan(""), 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("eg_step outputs stay valid simplex points") {
  Rng rng(99);
  SimplexPoint p = SimplexPoint::uniform(6);
  for (int it = 0; it < 10000; ++it) {
    const Vec g = random_vec(rng, 6, -4.0, 4.0);
    p = eg_step(p, g, 0.05 + rng.uniform01());
    CHECK(p.is_valid(1e-9));
  }
}

TEST_CASE("ktoco_step matches the coin-betting recursion") {
  CoinBettingState fresh(2);
  CHECK(fresh.current_point() == Vec{0.0, 0.0});
  CHECK(fresh.wealth_origin == 1.0);

  // First step plays the origin, so the emitted point is reward / 2.
  auto [s1, x1] = ktoco_step(fresh, Vec{0.6, 0.0});
  CHECK(x1[0] == doctest::Approx(-0.3));
  CHECK(x1[1] == doctest::Approx(0.0));
  CHECK(s1.round == 1);

  CoinBettingState zeros(3);
  for (int t = 0; t < 5; ++t) {
    auto [next, x] = ktoco_step(std::move(zeros), Vec{0.0, 0.0, 0.0});
    zeros = std::move(next);
    CHECK(l2_norm(x) == 0.0);
  }

  CHECK_THROWS_AS(ktoco_step(CoinBettingState(2), Vec{2.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("forecaster update and sampling") {
  GridDensity uniform = GridDensity::uniform_1d(0.0, 1.0, 4);
  const GridDensity shifted =
      forecaster_update(uniform, [](double, double) { return 3.0; }, 0.5);
  const Vec p = shifted.probabilities();
  for (double v : p) CHECK(v == doctest::Approx(0.25));

  GridDensity two = GridDensity::uniform_1d(0.0, 1.0, 2);
  const GridDensity updated = forecaster_update(
      two, [](double x, double) { return x; }, std::log(2.0));
  const Vec q = updated.probabilities();
  CHECK(q[0] == doctest::Approx(2.0 / 3.0));
  CHECK(q[1] == doctest::Approx(1.0 / 3.0));

  GridDensity frozen = GridDensity::uniform_1d(0.0, 1.0, 3);
  frozen.log_weights = {0.3, -0.4, 1.1};
  const GridDensity same =
      forecaster_update(frozen, [](double, double) { return 7.0; }, 0.0);
  CHECK(same.log_weights == Vec{0.3, -0.4, 1.1});
}

TEST_CASE("forecaster sampling follows the density") {
  GridDensity single = GridDensity::uniform_1d(2.0, 2.0, 1);
  Rng rng(5);
  CHECK(forecaster_sample(single, rng).first == 2.0);

  GridDensity four = GridDensity::uniform_1d(0.0, 3.0, 4);
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[forecaster_sample_index(four, rng)]++;
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (int c : counts) CHECK(std::fabs(c - draws * 0.25) <= 3.0 * sigma);

  GridDensity skewed = GridDensity::uniform_1d(0.0, 1.0, 2);
  skewed.log_weights = {0.0, -60.0};
  for (int i = 0; i < 10000; ++i) CHECK(forecaster_sample_index(skewed, rng) == 0);

  GridDensity empty;
  CHECK_THROWS_AS(forecaster_sample_index(empty, rng), std::invalid_argument);
}

TEST_CASE("online_to_batch averages iterates") {
  CHECK(online_to_batch({Vec{3.0}}) == Vec{3.0});
  CHECK(online_to_batch({Vec{0.0}, Vec{2.0}}) == Vec{1.0});
  CHECK(online_to_batch({Vec{1.5, -2.0}, Vec{1.5, -2.0}, Vec{1.5, -2.0}}) ==
        Vec{1.5, -2.0});
  CHECK_THROWS_AS(online_to_batch({}), std::invalid_argument);
}

TEST_CASE("l1 and linf subgradients on the stated points") {
  CHECK(l1_subgradient(Vec{1.0, 2.0}, Vec{1.0, 2.0}) == Vec{0.0, 0.0});
  CHECK(l1_subgradient(Vec{2.0, 0.0}, Vec{0.0, 1.0}) == Vec{1.0, -1.0});
  CHECK(l1_subgradient(Vec{1.0, 5.0}, Vec{0.0, 0.0}, Vec{3.0, 0.0}) ==
        Vec{3.0, 0.0});
  CHECK_THROWS_AS(l1_subgradient(Vec{1.0}, Vec{0.0}, Vec{-1.0}),
                  std::invalid_argument);

  CHECK(linf_subgradient(Vec{1.0, 1.0}, Vec{1.0, 1.0}) == Vec{0.0, 0.0});
  CHECK(linf_subgradient(Vec{0.0, 3.0}, Vec{0.0, 0.0}) == Vec{0.0, 1.0});
  // Tie |x - t| = (2, 2) resolves to the lowest index.
  CHECK(linf_subgradient(Vec{2.0, -2.0}, Vec{0.0, 0.0}) == Vec{1.0, 0.0});
}

TEST_CASE("subgradient inequality holds for l1, weighted l1 and linf") {
  Rng rng(4242);
  for (int it = 0; it < 10000; ++it) {
    const int d = 1 + static_cast<int>(rng.uniform_below(5));
    const Vec x = random_vec(rng, d, -3.0, 3.0);
    const Vec y = random_vec(rng, d, -3.0, 3.0);
    const Vec target = random_vec(rng, d, -3.0, 3.0);
    const Vec w = random_vec(rng, d, 0.0, 2.0);

    Vec diff(d);
    for (int i = 0; i < d; ++i) diff[i] = y[i] - x[i];

    const Vec g1 = l1_subgradient(x, target);
    CHECK(l1_loss(y, target) >= l1_loss(x, target) + dot(g1, diff) - 1e-9);

    const Vec gw = l1_subgradient(x, target, w);
    CHECK(l1_loss(y, target, &w) >= l1_loss(x, target, &w) + dot(gw, diff) - 1e-9);

    const Vec gi = linf_subgradient(x, target);
    CHECK(linf_loss(y, target) >= linf_loss(x, target) + dot(gi, diff) - 1e-9);
  }
}

TEST_CASE("best_in_hindsight_l1 hand-checked examples") {
  const BoxDomain wide = BoxDomain::centered_cube(1, 100.0);
  auto [x1, loss1] =
      best_in_hindsight_l1({Vec{1.0}, Vec{5.0}, Vec{3.0}}, {}, wide);
  CHECK(x1[0] == doctest::Approx(3.0));
  CHECK(loss1 == doctest::Approx(4.0));

  auto [x2, loss2] = best_in_hindsight_l1({Vec{7.5}}, {}, wide);
  CHECK(x2[0] == doctest::Approx(7.5));
  CHECK(loss2 == doctest::Approx(0.0));

  auto [x3, loss3] = best_in_hindsight_l1({Vec{0.0}, Vec{10.0}},
                                          {Vec{3.0}, Vec{1.0}}, wide);
  CHECK(x3[0] == doctest::Approx(0.0));
  CHECK(loss3 == doctest::Approx(10.0));
}

TEST_CASE("best_in_hindsight_l1 matches 1-D grid search") {
  Rng rng(1717);
  for (int instance = 0; instance < 100; ++instance) {
    const int T = 1 + static_cast<int>(rng.uniform_below(8));
    std::vector<Vec> targets, weights;
    for (int t = 0; t < T; ++t) {
      targets.push_back(Vec{rng.uniform_real(-2.0, 2.0)});
      weights.push_back(Vec{rng.uniform_real(0.0, 3.0)});
    }
    const BoxDomain box(Vec{-2.0}, Vec{2.0});
    const auto [x, loss] = best_in_hindsight_l1(targets, weights, box);
    CHECK(box.contains(x));

    // Exhaustive search over the 1e-3 grid plus the loss knots (the targets
    // themselves), which pins down the piecewise-linear minimum exactly.
    Vec candidates;
    for (double g = -2.0; g <= 2.0 + 1e-12; g += 1e-3) candidates.push_back(g);
    for (int t = 0; t < T; ++t) candidates.push_back(targets[t][0]);
    double grid_best = 1e18;
    for (double g : candidates) {
      double total = 0.0;
      for (int t = 0; t < T; ++t)
        total += weights[t][0] * std::fabs(g - targets[t][0]);
      grid_best = std::min(grid_best, total);
    }
    CHECK(loss <= grid_best + 1e-3);
    CHECK(loss >= grid_best - 1e-3);
  }
}

TEST_CASE("regret_report arithmetic and degenerate flag") {
  RegretLedger even;
  even.record(2.0, 0);
  even.record(2.0, 0);
  even.set_comparator(Vec{2.0, 2.0});
  even.bound_value = 1.0;
  const auto r0 = regret_report(even);
  CHECK(r0.regret == doctest::Approx(0.0));
  CHECK(r0.satisfied);

  RegretLedger ledger;
  ledger.record(3.0, 0);
  ledger.record(3.0, 0);
  ledger.comparator_loss = 4.0;
  ledger.bound_value = 5.0;
  const auto r1 = regret_report(ledger);
  CHECK(r1.regret == doctest::Approx(2.0));
  CHECK(r1.satisfied);
  CHECK_FALSE(r1.degenerate);

  RegretLedger empty;
  empty.comparator_loss = 4.0;
  const auto r2 = regret_report(empty);
  CHECK(r2.regret == doctest::Approx(-4.0));
  CHECK(r2.degenerate);
}

TEST_CASE("projected OGD meets its closed-form regret bound on sign-flip streams") {
  const int n = 4, T = 200;
  const double cap = 2.0;
  const BoxDomain box = BoxDomain::centered_cube(n, cap);
  const double step = cap / std::sqrt(2.0 * T);
  const double bound = cap * n * std::sqrt(2.0 * T);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(777, seed));
    std::vector<Vec> targets;
    for (int t = 0; t < T; ++t) {
      Vec y(n);
      for (double& v : y) v = rng.uniform01() < 0.5 ? -cap : cap;
      targets.push_back(std::move(y));
    }
    Vec x(n, 0.0);
    double learner_loss = 0.0;
    for (const Vec& y : targets) {
      learner_loss += l1_loss(x, y);
      x = ogd_step(x, l1_subgradient(x, y), step, box);
    }
    const auto [best, comparator_loss] = best_in_hindsight_l1(targets, {}, box);
    (void)best;
    CHECK(learner_loss - comparator_loss <= bound);
  }
}

TEST_CASE("averaged OGD iterates reach small excess risk on iid losses") {
  // Population: 1-D targets uniform on [-1, 1]; risk minimum is at 0.
  const double eps = 0.2, range = 2.0;
  const int T = static_cast<int>(
      std::ceil(range * range / (eps * eps) * (1.0 + 0.5 * std::log(1.0 / 0.1))));
  const BoxDomain box = BoxDomain::centered_cube(1, 1.0);
  const double step = 1.0 / std::sqrt(2.0 * T);

  Rng holdout_rng(2024);
  Vec holdout(100000);
  for (double& v : holdout) v = holdout_rng.uniform_real(-1.0, 1.0);
  auto risk = [&](double x) {
    double s = 0.0;
    for (double y : holdout) s += std::fabs(x - y);
    return s / static_cast<double>(holdout.size());
  };
  Vec sorted = holdout;
  std::sort(sorted.begin(), sorted.end());
  const double best_risk = risk(sorted[sorted.size() / 2]);

  int hits = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng(derive_seed(31337, trial));
    Vec x{0.9};
    std::vector<Vec> iterates;
    for (int t = 0; t < T; ++t) {
      const Vec target{rng.uniform_real(-1.0, 1.0)};
      iterates.push_back(x);
      x = ogd_step(x, l1_subgradient(x, target), step, box);
    }
    const Vec avg = online_to_batch(iterates);
    if (risk(avg[0]) - best_risk <= eps) ++hits;
  }
  CHECK(hits >= 18);
}
