#include "predlearn/skirental.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace predlearn::skirental {

namespace {

void validate_season(const SkiSeason& season) {
  if (!(season.buy_price > 0.0))
    throw std::invalid_argument("ski season: buy price must be positive");
  if (!(season.days > 1.0))
    throw std::invalid_argument("ski season: days must exceed 1");
}

}  // namespace

double discrete_cost(int x, const SkiSeason& season, int days_max) {
  validate_season(season);
  if (x < 1 || x > days_max)
    throw std::invalid_argument("discrete_cost: x out of range");
  return static_cast<double>(x) > season.buy_price ? season.buy_price : season.days;
}

double discrete_bound(int x, double lambda, const SkiSeason& season, int days_max) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("discrete_bound: lambda must lie in (0,1]");
  const double u = discrete_cost(x, season, days_max);
  const double numerator =
      std::min({lambda * u, season.buy_price, season.days});
  const double b = season.buy_price;
  const double denominator = 1.0 - std::pow(1.0 + 1.0 / b, -b * lambda);
  return numerator / denominator;
}

double continuous_cost(double x, const SkiSeason& season) {
  validate_season(season);
  if (!(x >= 0.0)) throw std::invalid_argument("continuous_cost: negative threshold");
  return season.days <= x ? season.days : season.buy_price + x;
}

double continuous_bound(double x, double lambda, const SkiSeason& season) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("continuous_bound: lambda must lie in (0,1]");
  const double e = std::exp(1.0);
  const double robust =
      e * std::min(season.days, season.buy_price) / ((e - 1.0) * lambda);
  if (lambda == 1.0) return robust;
  return std::min(continuous_cost(x, season) / (1.0 - lambda), robust);
}

GridLearnerResult discrete_grid_learner(const std::vector<SkiSeason>& seasons,
                                        int days_max, double price_max, Rng& rng,
                                        const GridLearnerOptions& options) {
  if (seasons.empty()) throw std::invalid_argument("discrete_grid_learner: empty stream");
  if (days_max < 2 || !(price_max > 0.0))
    throw std::invalid_argument("discrete_grid_learner: bad caps");
  for (const auto& s : seasons) {
    validate_season(s);
    if (s.days > days_max + 1e-9 || s.buy_price > price_max + 1e-9)
      throw std::invalid_argument("discrete_grid_learner: season exceeds caps");
  }
  const int T = static_cast<int>(seasons.size());
  const double N = static_cast<double>(days_max);

  // Lambda grid spacing tuned to trade discretization error against the
  // experts bound; snapped so 1/delta is an integer.
  double delta = options.delta_override;
  if (delta <= 0.0) {
    const double eN = std::exp(1.0 / N);
    delta = std::min(N * (eN - 1.0) * (eN - 1.0) / (price_max * eN) *
                         std::sqrt(2.0 / T),
                     1.0);
  }
  const int lambda_count = std::max(1, static_cast<int>(std::ceil(1.0 / delta)));
  delta = 1.0 / lambda_count;

  GridLearnerResult out;
  out.final_grid.days_max = days_max;
  out.final_grid.lambda_values.resize(lambda_count);
  for (int k = 0; k < lambda_count; ++k)
    out.final_grid.lambda_values[k] = delta * (k + 1);
  const std::size_t cells = std::size_t(days_max) * lambda_count;
  out.final_grid.joint = learners::SimplexPoint(Vec(cells, 1.0 / double(cells)));

  const double step =
      options.step_override > 0.0
          ? options.step_override
          : (1.0 / (2.0 * N)) * std::sqrt(std::log(N / delta) / (2.0 * T));

  Vec& w = out.final_grid.joint.weights;
  Vec value_buy(lambda_count), value_rent(lambda_count);
  Vec fact_buy(lambda_count), fact_rent(lambda_count);

  for (const auto& season : seasons) {
    const double b = season.buy_price;
    for (int k = 0; k < lambda_count; ++k) {
      const double lambda = out.final_grid.lambda_values[k];
      const double denom = 1.0 - std::pow(1.0 + 1.0 / b, -b * lambda);
      value_buy[k] = std::min({lambda * b, b, season.days}) / denom;
      value_rent[k] = std::min({lambda * season.days, b, season.days}) / denom;
      fact_buy[k] = std::exp(-step * value_buy[k]);
      fact_rent[k] = std::exp(-step * value_rent[k]);
    }

    double expected = 0.0;
    for (int x = 1; x <= days_max; ++x) {
      const Vec& vals = static_cast<double>(x) > b ? value_buy : value_rent;
      const std::size_t base = std::size_t(x - 1) * lambda_count;
      for (int k = 0; k < lambda_count; ++k) expected += w[base + k] * vals[k];
    }

    // Digest the sampled action, which is what a downstream run would use.
    const std::size_t pick = rng.categorical(w);
    const std::size_t x_index = pick / lambda_count;  // x-major layout
    const double action[2] = {static_cast<double>(x_index + 1),
                              out.final_grid.lambda_values[pick % lambda_count]};
    out.ledger.record(expected, digest_vector(action));

    double total = 0.0;
    for (int x = 1; x <= days_max; ++x) {
      const Vec& facts = static_cast<double>(x) > b ? fact_buy : fact_rent;
      const std::size_t base = std::size_t(x - 1) * lambda_count;
      for (int k = 0; k < lambda_count; ++k) {
        w[base + k] *= facts[k];
        total += w[base + k];
      }
    }
    for (double& v : w) v /= total;
  }

  // Comparator: best fixed (x, lambda) over a fine lambda scan plus the
  // learner's own grid, with the x dependence bucketed by buy price.
  double best = std::numeric_limits<double>::infinity();
  int best_x = 1;
  double best_lambda = 1.0;
  Vec bucket_buy(days_max + 2), bucket_rent(days_max + 2);
  auto scan_lambdas = [&](const Vec& lambdas) {
    for (double lambda : lambdas) {
      std::fill(bucket_buy.begin(), bucket_buy.end(), 0.0);
      std::fill(bucket_rent.begin(), bucket_rent.end(), 0.0);
      double rent_total = 0.0;
      for (const auto& season : seasons) {
        const double b = season.buy_price;
        const double denom = 1.0 - std::pow(1.0 + 1.0 / b, -b * lambda);
        const double buy_val = std::min({lambda * b, b, season.days}) / denom;
        const double rent_val =
            std::min({lambda * season.days, b, season.days}) / denom;
        // Buy branch applies to x > b, i.e. x >= floor(b) + 1.
        const int threshold =
            std::min(days_max + 1, static_cast<int>(std::floor(b)) + 1);
        bucket_buy[threshold] += buy_val;
        bucket_rent[threshold] += rent_val;
        rent_total += rent_val;
      }
      double buy_below = 0.0, rent_below = 0.0;
      for (int x = 1; x <= days_max; ++x) {
        buy_below += bucket_buy[x];
        rent_below += bucket_rent[x];
        const double total = buy_below + (rent_total - rent_below);
        if (total < best) {
          best = total;
          best_x = x;
          best_lambda = lambda;
        }
      }
    }
  };

  Vec reference(options.reference_lambda_points);
  for (int k = 0; k < options.reference_lambda_points; ++k)
    reference[k] = static_cast<double>(k + 1) / options.reference_lambda_points;
  scan_lambdas(reference);
  scan_lambdas(out.final_grid.lambda_values);

  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& season : seasons)
    comp_rounds.push_back(discrete_bound(best_x, best_lambda, season, days_max));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value = 6.0 * N * std::sqrt(T * std::log(price_max * N * T));
  return out;
}

ContinuousForecasterResult continuous_forecaster(
    const std::vector<SkiSeason>& seasons, double days_max, double price_max,
    double beta, Rng& rng, const ContinuousForecasterOptions& options) {
  if (seasons.empty()) throw std::invalid_argument("continuous_forecaster: empty stream");
  if (!(days_max > 1.0) || !(price_max > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("continuous_forecaster: bad parameters");
  for (const auto& s : seasons) validate_season(s);
  const int T = static_cast<int>(seasons.size());

  const double spacing = std::max(1.0 / T, 1e-3);
  const int x_points =
      options.x_points > 0 ? options.x_points : static_cast<int>(std::lround(1.0 / spacing)) + 1;
  const int lambda_points =
      options.lambda_points > 0 ? options.lambda_points
                                : static_cast<int>(std::lround(1.0 / spacing));

  ContinuousForecasterResult out;
  // Lambda axis starts one spacing above zero; the bound diverges at 0.
  out.final_density = learners::GridDensity::uniform_2d(
      0.0, days_max, x_points, 1.0 / lambda_points, 1.0, lambda_points);

  const std::size_t cells = out.final_density.size();
  const double loss_cap = std::exp(1.0) * (days_max + price_max);
  const double step =
      options.step_override > 0.0
          ? options.step_override
          : std::sqrt(8.0 * std::log(static_cast<double>(cells)) /
                      (T * loss_cap * loss_cap));

  Vec& lw = out.final_density.log_weights;
  Vec cumulative(cells, 0.0), prob(cells);
  Vec u_of_x(x_points), robust(lambda_points), inv1m(lambda_points);
  const double e = std::exp(1.0);
  for (int k = 0; k < lambda_points; ++k) {
    const double lambda = out.final_density.ys[k];
    inv1m[k] = lambda < 1.0 ? 1.0 / (1.0 - lambda)
                            : std::numeric_limits<double>::infinity();
  }

  for (const auto& season : seasons) {
    for (int i = 0; i < x_points; ++i)
      u_of_x[i] = continuous_cost(out.final_density.xs[i], season);
    const double r0 = e * std::min(season.days, season.buy_price) / (e - 1.0);
    for (int k = 0; k < lambda_points; ++k)
      robust[k] = r0 / out.final_density.ys[k];

    const double max_lw = *std::max_element(lw.begin(), lw.end());
    double mass = 0.0, expected = 0.0;
    std::size_t cell = 0;
    for (int i = 0; i < x_points; ++i) {
      for (int k = 0; k < lambda_points; ++k, ++cell) {
        const double loss = std::min(u_of_x[i] * inv1m[k], robust[k]);
        const double p = std::exp(lw[cell] - max_lw);
        prob[cell] = p;
        mass += p;
        expected += p * loss;
        cumulative[cell] += loss;
        lw[cell] -= step * loss;
      }
    }
    expected /= mass;

    // Sample from the pre-softmax weights already in prob.
    double u = rng.uniform01() * mass;
    std::size_t pick = cells - 1;
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < cells; ++c) {
      acc += prob[c];
      if (u < acc) {
        pick = c;
        break;
      }
    }
    const auto [ax, alambda] = out.final_density.point(pick);
    const double action[2] = {ax, alambda};
    out.ledger.record(expected, digest_vector(action));
  }

  const std::size_t best_cell =
      std::min_element(cumulative.begin(), cumulative.end()) - cumulative.begin();
  const auto [best_x, best_lambda] = out.final_density.point(best_cell);
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& season : seasons)
    comp_rounds.push_back(continuous_bound(best_x, best_lambda, season));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value =
      options.bound_c1 * std::sqrt(T * std::log(days_max * T)) +
      options.bound_c2 * (days_max + price_max) * (days_max + price_max) *
          std::pow(static_cast<double>(T), 1.0 - beta);
  return out;
}

DispersionReport dispersion_check(std::span<const double> points, double beta,
                                  int horizon, double c, double epsilon_override) {
  if (points.empty()) throw std::invalid_argument("dispersion_check: no points");
  if (horizon <= 0) throw std::invalid_argument("dispersion_check: bad horizon");
  DispersionReport rep;
  rep.epsilon = epsilon_override > 0.0
                    ? epsilon_override
                    : std::pow(static_cast<double>(horizon), -beta);

  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  const double width = 2.0 * rep.epsilon;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < sorted.size(); ++hi) {
    while (sorted[hi] - sorted[lo] >= width) ++lo;
    rep.max_ball_count =
        std::max(rep.max_ball_count, static_cast<int>(hi - lo + 1));
  }

  rep.budget = c * rep.epsilon * static_cast<double>(horizon) *
               std::log(static_cast<double>(horizon));
  rep.pass = rep.max_ball_count <= rep.budget;
  return rep;
}

std::vector<SkiSeason> read_seasons(std::istream& in) {
  std::vector<SkiSeason> seasons;
  double n, b;
  while (in >> n >> b) {
    SkiSeason s{n, b};
    validate_season(s);
    seasons.push_back(s);
  }
  return seasons;
}

void write_seasons(std::ostream& out, std::span<const SkiSeason> seasons) {
  out.precision(17);
  for (const auto& s : seasons) out << s.days << ' ' << s.buy_price << '\n';
}

}  // namespace predlearn::skirental
