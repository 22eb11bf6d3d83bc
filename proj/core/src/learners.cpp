#include "predlearn/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace predlearn::learners {

BoxDomain::BoxDomain(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size())
    throw std::invalid_argument("BoxDomain: bound dimension mismatch");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]))
      throw std::invalid_argument("BoxDomain: lower bound exceeds upper bound");
}

BoxDomain BoxDomain::centered_cube(int dim, double half_width) {
  if (dim <= 0 || half_width < 0.0)
    throw std::invalid_argument("BoxDomain::centered_cube: bad arguments");
  return BoxDomain(Vec(dim, -half_width), Vec(dim, half_width));
}

Vec BoxDomain::project(Vec x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("BoxDomain::project: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], lower[i], upper[i]);
  return x;
}

bool BoxDomain::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  return true;
}

SimplexPoint SimplexPoint::uniform(int k) {
  if (k <= 0) throw std::invalid_argument("SimplexPoint::uniform: k must be positive");
  return SimplexPoint(Vec(k, 1.0 / k));
}

SimplexPoint SimplexPoint::one_hot(int k, int index) {
  if (k <= 0 || index < 0 || index >= k)
    throw std::invalid_argument("SimplexPoint::one_hot: index out of range");
  Vec w(k, 0.0);
  w[index] = 1.0;
  return SimplexPoint(std::move(w));
}

bool SimplexPoint::is_valid(double tol) const {
  if (weights.empty()) return false;
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) return false;
    sum += w;
  }
  return std::fabs(sum - 1.0) <= tol;
}

void SimplexPoint::validate(double tol) const {
  if (!is_valid(tol)) throw std::invalid_argument("SimplexPoint: not a probability vector");
}

GridDensity GridDensity::uniform_1d(double lo, double hi, int points) {
  if (points <= 0 || !(lo <= hi))
    throw std::invalid_argument("GridDensity::uniform_1d: bad arguments");
  GridDensity g;
  g.xs.resize(points);
  const double h = points > 1 ? (hi - lo) / (points - 1) : 0.0;
  for (int i = 0; i < points; ++i) g.xs[i] = lo + h * i;
  g.log_weights.assign(points, 0.0);
  return g;
}

GridDensity GridDensity::uniform_2d(double x_lo, double x_hi, int x_points,
                                    double y_lo, double y_hi, int y_points) {
  if (x_points <= 0 || y_points <= 0 || !(x_lo <= x_hi) || !(y_lo <= y_hi))
    throw std::invalid_argument("GridDensity::uniform_2d: bad arguments");
  GridDensity g;
  g.xs.resize(x_points);
  g.ys.resize(y_points);
  const double hx = x_points > 1 ? (x_hi - x_lo) / (x_points - 1) : 0.0;
  const double hy = y_points > 1 ? (y_hi - y_lo) / (y_points - 1) : 0.0;
  for (int i = 0; i < x_points; ++i) g.xs[i] = x_lo + hx * i;
  for (int j = 0; j < y_points; ++j) g.ys[j] = y_lo + hy * j;
  g.log_weights.assign(std::size_t(x_points) * y_points, 0.0);
  return g;
}

std::pair<double, double> GridDensity::point(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("GridDensity::point: index out of range");
  if (!is_2d()) return {xs[index], 0.0};
  const std::size_t ny = ys.size();
  return {xs[index / ny], ys[index % ny]};
}

Vec GridDensity::probabilities() const {
  if (log_weights.empty()) throw std::invalid_argument("GridDensity: empty grid");
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  Vec p(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_weights[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

Vec CoinBettingState::current_point() const {
  Vec x(reward_sum.size(), 0.0);
  const double scale = (wealth_origin + inner_sum) / static_cast<double>(round + 1);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = scale * reward_sum[i];
  return x;
}

void RegretLedger::record(double loss, std::uint64_t action_digest) {
  rounds.push_back({static_cast<int>(rounds.size()) + 1, loss, action_digest});
}

double RegretLedger::cumulative_loss() const {
  double s = 0.0;
  for (const auto& r : rounds) s += r.loss;
  return s;
}

void RegretLedger::set_comparator(Vec round_losses) {
  comparator_round_losses = std::move(round_losses);
  comparator_loss = 0.0;
  for (double v : comparator_round_losses) comparator_loss += v;
}

RegretReport regret_report(const RegretLedger& ledger) {
  RegretReport rep;
  rep.regret = ledger.cumulative_loss() - ledger.comparator_loss;
  rep.bound = ledger.bound_value;
  rep.satisfied = rep.regret <= rep.bound;
  rep.degenerate = ledger.rounds.empty();
  return rep;
}

Vec ogd_step(std::span<const double> point, std::span<const double> subgrad,
             double step_size, const BoxDomain& domain) {
  check_same_size(point, subgrad, "ogd_step");
  if (static_cast<int>(point.size()) != domain.dim())
    throw std::invalid_argument("ogd_step: domain dimension mismatch");
  if (!(step_size > 0.0)) throw std::invalid_argument("ogd_step: step size must be positive");
  if (!all_finite(subgrad)) throw std::invalid_argument("ogd_step: non-finite subgradient");
  Vec next(point.begin(), point.end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] -= step_size * subgrad[i];
  return domain.project(std::move(next));
}

SimplexPoint eg_step(const SimplexPoint& dist, std::span<const double> subgrad,
                     double step_size) {
  dist.validate();
  if (subgrad.size() != dist.weights.size())
    throw std::invalid_argument("eg_step: dimension mismatch");
  if (!(step_size > 0.0)) throw std::invalid_argument("eg_step: step size must be positive");
  if (!all_finite(subgrad)) throw std::invalid_argument("eg_step: non-finite subgradient");

  // Shift exponents by the support maximum so the normalizer stays in range.
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < subgrad.size(); ++i)
    if (dist.weights[i] > 0.0) shift = std::max(shift, -step_size * subgrad[i]);

  Vec w(dist.weights.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (dist.weights[i] > 0.0) {
      w[i] = dist.weights[i] * std::exp(-step_size * subgrad[i] - shift);
      sum += w[i];
    }
  }
  for (double& v : w) v /= sum;
  return SimplexPoint(std::move(w));
}

std::pair<CoinBettingState, Vec> ktoco_step(CoinBettingState state,
                                            std::span<const double> subgrad) {
  if (subgrad.size() != state.reward_sum.size())
    throw std::invalid_argument("ktoco_step: dimension mismatch");
  if (!all_finite(subgrad)) throw std::invalid_argument("ktoco_step: non-finite subgradient");
  if (l2_norm(subgrad) > 1.0 + 1e-9)
    throw std::invalid_argument("ktoco_step: subgradient norm exceeds 1");

  const Vec played = state.current_point();
  double reward_dot = 0.0;
  for (std::size_t i = 0; i < subgrad.size(); ++i) {
    const double reward = -subgrad[i];
    reward_dot += reward * played[i];
    state.reward_sum[i] += reward;
  }
  state.inner_sum += reward_dot;
  state.round += 1;
  Vec next = state.current_point();
  return {std::move(state), std::move(next)};
}

GridDensity forecaster_update(GridDensity density,
                              const std::function<double(double, double)>& loss_at,
                              double step_size) {
  if (!(step_size >= 0.0))
    throw std::invalid_argument("forecaster_update: step size must be nonnegative");
  for (std::size_t i = 0; i < density.size(); ++i) {
    const auto [x, y] = density.point(i);
    const double loss = loss_at(x, y);
    if (!std::isfinite(loss))
      throw std::invalid_argument("forecaster_update: non-finite loss on grid");
    density.log_weights[i] -= step_size * loss;
  }
  return density;
}

std::size_t forecaster_sample_index(const GridDensity& density, Rng& rng) {
  if (density.size() == 0) throw std::invalid_argument("forecaster_sample: empty grid");
  const Vec p = density.probabilities();
  return rng.categorical(p);
}

std::pair<double, double> forecaster_sample(const GridDensity& density, Rng& rng) {
  return density.point(forecaster_sample_index(density, rng));
}

double forecaster_expected_loss(const GridDensity& density,
                                const std::function<double(double, double)>& loss_at) {
  const Vec p = density.probabilities();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto [x, y] = density.point(i);
    s += p[i] * loss_at(x, y);
  }
  return s;
}

Vec online_to_batch(const std::vector<Vec>& iterates) {
  if (iterates.empty()) throw std::invalid_argument("online_to_batch: empty iterate list");
  Vec mean(iterates.front().size(), 0.0);
  for (const Vec& x : iterates) {
    if (x.size() != mean.size())
      throw std::invalid_argument("online_to_batch: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) mean[i] += x[i];
  }
  for (double& v : mean) v /= static_cast<double>(iterates.size());
  return mean;
}

Vec l1_subgradient(std::span<const double> x, std::span<const double> target,
                   std::span<const double> weights) {
  check_same_size(x, target, "l1_subgradient");
  if (!weights.empty() && weights.size() != x.size())
    throw std::invalid_argument("l1_subgradient: weight dimension mismatch");
  Vec g(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w < 0.0) throw std::invalid_argument("l1_subgradient: negative weight");
    const double d = x[i] - target[i];
    g[i] = d > 0.0 ? w : (d < 0.0 ? -w : 0.0);
  }
  return g;
}

Vec linf_subgradient(std::span<const double> x, std::span<const double> target) {
  check_same_size(x, target, "linf_subgradient");
  Vec g(x.size(), 0.0);
  double best = 0.0;
  std::size_t best_i = 0;
  bool any = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::fabs(x[i] - target[i]);
    if (a > best) {
      best = a;
      best_i = i;
      any = true;
    }
  }
  if (any) g[best_i] = x[best_i] > target[best_i] ? 1.0 : -1.0;
  return g;
}

std::pair<Vec, double> best_in_hindsight_l1(const std::vector<Vec>& targets,
                                            const std::vector<Vec>& weights,
                                            const learners::BoxDomain& domain) {
  if (targets.empty()) throw std::invalid_argument("best_in_hindsight_l1: no targets");
  if (!weights.empty() && weights.size() != targets.size())
    throw std::invalid_argument("best_in_hindsight_l1: weight list size mismatch");
  const std::size_t d = targets.front().size();
  if (static_cast<int>(d) != domain.dim())
    throw std::invalid_argument("best_in_hindsight_l1: domain dimension mismatch");

  Vec minimizer(d, 0.0);
  std::vector<std::pair<double, double>> column;  // (value, weight)
  for (std::size_t i = 0; i < d; ++i) {
    column.clear();
    double total = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double w = weights.empty() ? 1.0 : weights[t][i];
      if (w < 0.0) throw std::invalid_argument("best_in_hindsight_l1: negative weight");
      column.emplace_back(targets[t][i], w);
      total += w;
    }
    double x;
    if (total <= 0.0) {
      // Objective is flat in this coordinate; pick the box point closest to 0.
      x = std::clamp(0.0, domain.lower[i], domain.upper[i]);
    } else {
      std::sort(column.begin(), column.end());
      double acc = 0.0;
      x = column.back().first;
      for (const auto& [v, w] : column) {
        acc += w;
        if (acc >= total / 2.0) {
          x = v;
          break;
        }
      }
      x = std::clamp(x, domain.lower[i], domain.upper[i]);
    }
    minimizer[i] = x;
  }

  double loss = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      const double w = weights.empty() ? 1.0 : weights[t][i];
      loss += w * std::fabs(minimizer[i] - targets[t][i]);
    }
  }
  return {std::move(minimizer), loss};
}

}  // namespace predlearn::learners
