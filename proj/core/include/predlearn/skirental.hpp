#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "predlearn/learners.hpp"
#include "predlearn/rng.hpp"

namespace predlearn::skirental {

/// One ski season: number of ski days and the buy price.
struct SkiSeason {
  double days = 2.0;       // integer-valued in discrete mode
  double buy_price = 1.0;  // positive
};

/// Generic robustness-consistency shape: a monotone increasing factor on the
/// prediction quality against a monotone decreasing worst-case fallback.
struct TradeoffTemplate {
  std::function<double(double)> f_of_lambda;
  std::function<double(double)> g_of_lambda;

  double evaluate(double quality, double lambda) const {
    return std::min(f_of_lambda(lambda) * quality, g_of_lambda(lambda));
  }
};

/// Cost of the buy-iff-price-below-x policy: b when x > b, else n.
double discrete_cost(int x, const SkiSeason& season, int days_max);

/// min{lambda * cost, b, n} / (1 - (1 + 1/b)^(-b * lambda)).
double discrete_bound(int x, double lambda, const SkiSeason& season, int days_max);

/// Cost of buying after threshold x: n if n <= x, else b + x.
double continuous_cost(double x, const SkiSeason& season);

/// min{cost / (1 - lambda), e * min{n,b} / ((e-1) * lambda)}; at lambda = 1
/// only the robust term survives.
double continuous_bound(double x, double lambda, const SkiSeason& season);

/// Joint distribution over buy-day {1..N} times the lambda grid {k*delta}.
struct ProductGrid {
  int days_max = 0;
  Vec lambda_values;
  learners::SimplexPoint joint;  // x-major layout

  std::size_t lambda_count() const { return lambda_values.size(); }
  std::size_t index(int x, std::size_t k) const {
    return static_cast<std::size_t>(x - 1) * lambda_values.size() + k;
  }
};

struct GridLearnerOptions {
  double step_override = 0.0;
  double delta_override = 0.0;        // lambda grid spacing; 0 means the tuned value
  int reference_lambda_points = 10000;  // comparator scan resolution
};

struct GridLearnerResult {
  learners::RegretLedger ledger;
  ProductGrid final_grid;
};

/// Exponentiated gradient over the product grid for the discrete problem.
/// Recorded losses are expectations under the current joint distribution;
/// digests come from the sampled (x, lambda) action.
GridLearnerResult discrete_grid_learner(const std::vector<SkiSeason>& seasons,
                                        int days_max, double price_max, Rng& rng,
                                        const GridLearnerOptions& options = {});

struct ContinuousForecasterOptions {
  int x_points = 0;       // 0 means spacing max(1/T, 1e-3) relative to the axis
  int lambda_points = 0;  // same default rule
  double step_override = 0.0;
  double bound_c1 = 1.0;  // constants of the recorded closed-form bound
  double bound_c2 = 1.0;
};

struct ContinuousForecasterResult {
  learners::RegretLedger ledger;
  learners::GridDensity final_density;
};

/// Exponentially weighted forecaster over a 2-D (threshold, lambda) grid for
/// the continuous problem.
ContinuousForecasterResult continuous_forecaster(
    const std::vector<SkiSeason>& seasons, double days_max, double price_max,
    double beta, Rng& rng, const ContinuousForecasterOptions& options = {});

struct DispersionReport {
  int max_ball_count = 0;
  bool pass = false;
  double epsilon = 0.0;
  double budget = 0.0;  // c * epsilon * T * log T
};

/// Largest number of points in any half-open ball [x - eps, x + eps), taken
/// over all centers (computed exactly by a sliding window over the sorted
/// points). Passes when the count stays within c * eps * T * log T.
DispersionReport dispersion_check(std::span<const double> points, double beta,
                                  int horizon, double c = 4.0,
                                  double epsilon_override = 0.0);

// Season stream file: one "n b" pair per line.
std::vector<SkiSeason> read_seasons(std::istream& in);
void write_seasons(std::ostream& out, std::span<const SkiSeason> seasons);

}  // namespace predlearn::skirental
