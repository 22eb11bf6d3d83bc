#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "predlearn/linalg.hpp"
#include "predlearn/rng.hpp"

namespace predlearn::learners {

/// Axis-aligned box; projection is coordinatewise clipping.
struct BoxDomain {
  Vec lower;
  Vec upper;

  BoxDomain(Vec lo, Vec hi);

  /// [-half_width, half_width]^dim
  static BoxDomain centered_cube(int dim, double half_width);

  int dim() const { return static_cast<int>(lower.size()); }
  Vec project(Vec x) const;
  bool contains(std::span<const double> x, double tol = 1e-12) const;
};

/// Probability vector: nonnegative, sums to 1 within 1e-9.
struct SimplexPoint {
  Vec weights;

  SimplexPoint() = default;
  explicit SimplexPoint(Vec w) : weights(std::move(w)) {}

  static SimplexPoint uniform(int k);
  static SimplexPoint one_hot(int k, int index);

  int dim() const { return static_cast<int>(weights.size()); }
  bool is_valid(double tol = 1e-9) const;
  void validate(double tol = 1e-9) const;
};

/// Log-weighted density over a uniform 1-D or 2-D grid. Normalization is
/// deferred to sampling; weights follow exp(log_weights).
struct GridDensity {
  Vec xs;           // first-axis grid values
  Vec ys;           // second-axis grid values; empty means 1-D
  Vec log_weights;  // row-major over (x index, y index)

  static GridDensity uniform_1d(double lo, double hi, int points);
  static GridDensity uniform_2d(double x_lo, double x_hi, int x_points,
                                double y_lo, double y_hi, int y_points);

  std::size_t size() const { return log_weights.size(); }
  bool is_2d() const { return !ys.empty(); }
  /// (x, y) of a flat index; y is 0 for 1-D grids.
  std::pair<double, double> point(std::size_t index) const;
  /// Normalized probabilities exp(log_weights) / sum.
  Vec probabilities() const;
};

/// Coin-betting (KT) state. Rewards are negated subgradients; wealth starts
/// at wealth_origin = 1.
struct CoinBettingState {
  double wealth_origin = 1.0;
  Vec reward_sum;
  double inner_sum = 0.0;  // running sum of <reward_s, played point_s>
  long long round = 0;

  explicit CoinBettingState(int dim) : reward_sum(dim, 0.0) {}

  /// Point the learner plays at the current round.
  Vec current_point() const;
};

struct RoundRecord {
  int round = 0;
  double loss = 0.0;
  std::uint64_t action_digest = 0;
};

/// Per-round losses of one learner plus the hindsight comparator and the
/// closed-form bound the run is tested against.
struct RegretLedger {
  std::vector<RoundRecord> rounds;
  double comparator_loss = 0.0;
  double bound_value = 0.0;
  Vec comparator_round_losses;  // per-round losses of the comparator action

  void record(double loss, std::uint64_t action_digest);
  double cumulative_loss() const;
  /// Store the comparator's per-round losses and their total.
  void set_comparator(Vec round_losses);
};

struct RegretReport {
  double regret = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  bool degenerate = false;  // no rounds recorded
};

RegretReport regret_report(const RegretLedger& ledger);

/// One projected subgradient step over a box.
Vec ogd_step(std::span<const double> point, std::span<const double> subgrad,
             double step_size, const BoxDomain& domain);

/// Multiplicative-weights step followed by renormalization. Zero-weight
/// coordinates stay at zero.
SimplexPoint eg_step(const SimplexPoint& dist, std::span<const double> subgrad,
                     double step_size);

/// Parameter-free coin-betting step; consumes the reward -subgrad and emits
/// the next point. Caller keeps subgradient Euclidean norm at most 1.
std::pair<CoinBettingState, Vec> ktoco_step(CoinBettingState state,
                                            std::span<const double> subgrad);

/// Decrement log-weights by step_size * loss at each grid point.
GridDensity forecaster_update(GridDensity density,
                              const std::function<double(double, double)>& loss_at,
                              double step_size);

/// Flat grid index drawn with probability proportional to exp(log_weight).
std::size_t forecaster_sample_index(const GridDensity& density, Rng& rng);
std::pair<double, double> forecaster_sample(const GridDensity& density, Rng& rng);

/// Expectation of loss_at under the normalized density.
double forecaster_expected_loss(const GridDensity& density,
                                const std::function<double(double, double)>& loss_at);

/// Arithmetic mean of the iterates.
Vec online_to_batch(const std::vector<Vec>& iterates);

/// Coordinatewise weights * sign(x - target) with sign(0) = 0. Empty weights
/// means unit weights.
Vec l1_subgradient(std::span<const double> x, std::span<const double> target,
                   std::span<const double> weights = {});

/// One-hot at the lowest index achieving max |x_i - target_i|, signed; zero
/// vector when x equals target.
Vec linf_subgradient(std::span<const double> x, std::span<const double> target);

/// Exact minimizer of sum_t ||x - target_t||_{weights_t,1} over the box:
/// coordinatewise weighted median clipped to the box. Returns the minimizer
/// and its total loss. Empty weights list means unit weights throughout.
std::pair<Vec, double> best_in_hindsight_l1(const std::vector<Vec>& targets,
                                            const std::vector<Vec>& weights,
                                            const BoxDomain& domain);

}  // namespace predlearn::learners
