#include "predlearn/migration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace predlearn::migration {

MetricSpace::MetricSpace(std::vector<std::vector<double>> distances)
    : dist_(std::move(distances)) {
  const int k = static_cast<int>(dist_.size());
  if (k == 0) throw std::invalid_argument("metric: empty");
  for (int a = 0; a < k; ++a) {
    if (static_cast<int>(dist_[a].size()) != k)
      throw std::invalid_argument("metric: matrix not square");
    if (dist_[a][a] != 0.0) throw std::invalid_argument("metric: nonzero diagonal");
    for (int b = 0; b < k; ++b) {
      if (!(dist_[a][b] >= 0.0)) throw std::invalid_argument("metric: negative distance");
      if (dist_[a][b] != dist_[b][a]) throw std::invalid_argument("metric: not symmetric");
    }
  }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c)
        if (dist_[a][c] > dist_[a][b] + dist_[b][c] + 1e-9)
          throw std::invalid_argument("metric: triangle inequality violated");
}

int MigrationProblem::window() const {
  const double w = gamma * migration_factor;
  const long long rounded = std::llround(w);
  if (std::fabs(w - static_cast<double>(rounded)) > 1e-9 || rounded < 1)
    throw std::invalid_argument("migration: gamma * D must be a positive integer");
  return static_cast<int>(rounded);
}

void MigrationProblem::validate(const MetricSpace& metric) const {
  if (!(migration_factor > 1.0))
    throw std::invalid_argument("migration: D must exceed 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("migration: gamma must lie in (0,1)");
  if (window() > length())
    throw std::invalid_argument("migration: window exceeds sequence length");
  for (int s : requests)
    if (s < 0 || s >= metric.points())
      throw std::invalid_argument("migration: request out of range");
}

void PredictionStack::validate(int k) const {
  for (const auto& row : rows) {
    row.validate();
    if (row.dim() != k) throw std::invalid_argument("prediction stack: row dimension mismatch");
  }
}

PredictionStack PredictionStack::uniform(int n, int k) {
  PredictionStack p;
  p.rows.assign(n, learners::SimplexPoint::uniform(k));
  return p;
}

Vec PredictionStack::flattened() const {
  Vec flat;
  for (const auto& row : rows)
    flat.insert(flat.end(), row.weights.begin(), row.weights.end());
  return flat;
}

double trajectory_cost(const MetricSpace& metric, std::span<const int> requests,
                       std::span<const int> states, double migration_factor) {
  if (requests.size() != states.size())
    throw std::invalid_argument("trajectory_cost: length mismatch");
  double cost = 0.0;
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (j > 0) cost += migration_factor * metric.d(states[j - 1], states[j]);
    cost += metric.d(states[j], requests[j]);
  }
  return cost;
}

Trajectory offline_opt(const MetricSpace& metric, const MigrationProblem& problem) {
  problem.validate(metric);
  const int n = problem.length();
  const int k = metric.points();
  const double d_factor = problem.migration_factor;

  Trajectory out;
  if (n == 0) return out;

  std::vector<std::vector<double>> best(n, std::vector<double>(k));
  std::vector<std::vector<int>> parent(n, std::vector<int>(k, -1));
  for (int a = 0; a < k; ++a) best[0][a] = metric.d(a, problem.requests[0]);
  for (int j = 1; j < n; ++j) {
    for (int a = 0; a < k; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int prev = 0; prev < k; ++prev) {
        const double c = best[j - 1][prev] + d_factor * metric.d(prev, a);
        if (c < lo) {
          lo = c;
          arg = prev;
        }
      }
      best[j][a] = lo + metric.d(a, problem.requests[j]);
      parent[j][a] = arg;
    }
  }

  int tail = 0;
  for (int a = 1; a < k; ++a)
    if (best[n - 1][a] < best[n - 1][tail]) tail = a;
  out.total_cost = best[n - 1][tail];
  out.states.assign(n, 0);
  for (int j = n - 1; j >= 0; --j) {
    out.states[j] = tail;
    if (j > 0) tail = parent[j][tail];
  }
  return out;
}

double lazy_predicted_run(const MetricSpace& metric, const MigrationProblem& problem,
                          std::span<const int> predicted) {
  if (static_cast<int>(predicted.size()) != problem.length())
    throw std::invalid_argument("lazy_predicted_run: prediction length mismatch");
  MigrationProblem planned = problem;
  planned.requests.assign(predicted.begin(), predicted.end());
  const Trajectory plan = offline_opt(metric, planned);
  return trajectory_cost(metric, problem.requests, plan.states,
                         problem.migration_factor);
}

double mistake_fraction(std::span<const int> predicted,
                        std::span<const int> true_requests, int window) {
  if (predicted.size() != true_requests.size())
    throw std::invalid_argument("mistake_fraction: length mismatch");
  const int n = static_cast<int>(predicted.size());
  if (window < 1 || window > n)
    throw std::invalid_argument("mistake_fraction: window out of range");
  std::vector<int> prefix(n + 1, 0);
  for (int j = 0; j < n; ++j)
    prefix[j + 1] = prefix[j] + (predicted[j] != true_requests[j] ? 1 : 0);
  int worst = 0;
  for (int i = 0; i + window <= n; ++i)
    worst = std::max(worst, prefix[i + window] - prefix[i]);
  return static_cast<double>(worst) / window;
}

namespace {

// Returns (loss, first maximizing window start).
std::pair<double, int> window_loss_impl(const PredictionStack& stack,
                                        std::span<const int> true_requests,
                                        int window) {
  const int n = stack.length();
  if (static_cast<int>(true_requests.size()) != n)
    throw std::invalid_argument("window_loss: length mismatch");
  if (window < 1 || window > n)
    throw std::invalid_argument("window_loss: window out of range");
  std::vector<double> prefix(n + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    const int s = true_requests[j];
    if (s < 0 || s >= stack.rows[j].dim())
      throw std::invalid_argument("window_loss: request out of range");
    prefix[j + 1] = prefix[j] + (1.0 - stack.rows[j].weights[s]);
  }
  double worst = -1.0;
  int arg = 0;
  for (int i = 0; i + window <= n; ++i) {
    const double sum = prefix[i + window] - prefix[i];
    if (sum > worst) {
      worst = sum;
      arg = i;
    }
  }
  return {worst, arg};
}

}  // namespace

double window_loss(const PredictionStack& stack, std::span<const int> true_requests,
                   int window) {
  return window_loss_impl(stack, true_requests, window).first;
}

std::vector<Vec> window_loss_subgradient(const PredictionStack& stack,
                                         std::span<const int> true_requests,
                                         int window) {
  const auto [loss, start] = window_loss_impl(stack, true_requests, window);
  (void)loss;
  std::vector<Vec> grad(stack.length());
  for (int j = 0; j < stack.length(); ++j) grad[j].assign(stack.rows[j].dim(), 0.0);
  for (int j = start; j < start + window; ++j) grad[j][true_requests[j]] = -1.0;
  return grad;
}

double lambert_w(double v) {
  if (!(v >= 0.0)) throw std::invalid_argument("lambert_w: negative input");
  if (v == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi * std::exp(hi) < v) hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) < v)
      lo = mid;
    else
      hi = mid;
  }
  double w = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {  // Newton polish
    const double ew = std::exp(w);
    const double g = w * ew - v;
    w -= g / (ew * (w + 1.0));
    if (w < 0.0) w = 0.0;
  }
  return w;
}

MistakeBound mistake_bound(double u, int n, int window) {
  if (!(u >= 0.0)) throw std::invalid_argument("mistake_bound: negative loss");
  if (window < 1 || window > n)
    throw std::invalid_argument("mistake_bound: window out of range");
  const double log_windows = std::log(static_cast<double>(n - window + 1));
  MistakeBound out;
  out.linear_value =
      (std::exp(1.0) * u + (2.0 / std::exp(1.0)) * log_windows) / window;
  if (u == 0.0) {
    out.f_value = 0.0;
    return out;
  }
  const double t = lambert_w(log_windows / u) + 1.0;
  out.f_value = (u * (std::exp(t) - 1.0) + log_windows) / (t * window);
  return out;
}

std::vector<int> sample_predictions(const PredictionStack& stack, Rng& rng) {
  if (stack.length() == 0)
    throw std::invalid_argument("sample_predictions: empty stack");
  std::vector<int> out(stack.length());
  for (int j = 0; j < stack.length(); ++j)
    out[j] = static_cast<int>(rng.categorical(stack.rows[j].weights));
  return out;
}

namespace {

double total_stream_loss(const PredictionStack& stack,
                         const std::vector<std::vector<int>>& stream, int window) {
  double total = 0.0;
  for (const auto& s : stream) total += window_loss(stack, s, window);
  return total;
}

}  // namespace

SequenceLearnerResult eg_sequence_learner(
    const std::vector<std::vector<int>>& request_stream, const MetricSpace& metric,
    double migration_factor, double gamma, const SequenceLearnerOptions& options) {
  if (request_stream.empty())
    throw std::invalid_argument("eg_sequence_learner: empty stream");
  const int n = static_cast<int>(request_stream.front().size());
  const int k = metric.points();
  for (const auto& s : request_stream)
    if (static_cast<int>(s.size()) != n)
      throw std::invalid_argument("eg_sequence_learner: ragged stream");

  MigrationProblem shape;
  shape.requests = request_stream.front();
  shape.migration_factor = migration_factor;
  shape.gamma = gamma;
  shape.validate(metric);
  const int window = shape.window();
  const int T = static_cast<int>(request_stream.size());

  const double wd = static_cast<double>(window);
  const double step = options.step_override > 0.0
                          ? options.step_override
                          : std::sqrt(std::log(static_cast<double>(k)) /
                                      (2.0 * wd * wd * T));

  SequenceLearnerResult result;
  PredictionStack stack = PredictionStack::uniform(n, k);
  PredictionStack sum = stack;  // running average of iterates
  for (auto& row : sum.rows) std::fill(row.weights.begin(), row.weights.end(), 0.0);

  for (const auto& s : request_stream) {
    const double loss = window_loss(stack, s, window);
    result.ledger.record(loss, digest_vector(stack.flattened()));
    const auto grad = window_loss_subgradient(stack, s, window);
    for (int j = 0; j < n; ++j) {
      for (int c = 0; c < k; ++c) sum.rows[j].weights[c] += stack.rows[j].weights[c];
      if (l1_norm(grad[j]) > 0.0)
        stack.rows[j] = learners::eg_step(stack.rows[j], grad[j], step);
    }
  }

  // Hindsight comparator: best of several candidates, then refined by
  // offline multiplicative-weight passes on the summed loss.
  PredictionStack average = sum;
  for (auto& row : average.rows)
    for (double& w : row.weights) w /= static_cast<double>(T);

  PredictionStack modal = PredictionStack::uniform(n, k);
  for (int j = 0; j < n; ++j) {
    std::vector<int> counts(k, 0);
    for (const auto& s : request_stream) counts[s[j]]++;
    const int arg = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    modal.rows[j] = learners::SimplexPoint::one_hot(k, arg);
  }

  PredictionStack best = PredictionStack::uniform(n, k);
  double best_loss = total_stream_loss(best, request_stream, window);
  for (const PredictionStack* cand : {&modal, &average, &stack}) {
    const double cand_loss = total_stream_loss(*cand, request_stream, window);
    if (cand_loss < best_loss) {
      best_loss = cand_loss;
      best = *cand;
    }
  }

  PredictionStack refine = best;
  for (int pass = 1; pass <= options.offline_comparator_passes; ++pass) {
    std::vector<Vec> total_grad(n, Vec(k, 0.0));
    for (const auto& s : request_stream) {
      const auto g = window_loss_subgradient(refine, s, window);
      for (int j = 0; j < n; ++j)
        for (int c = 0; c < k; ++c) total_grad[j][c] += g[j][c];
    }
    const double pass_step = 0.5 / (T * std::sqrt(static_cast<double>(pass)));
    for (int j = 0; j < n; ++j) {
      // Mix with uniform so support never collapses during refinement.
      learners::SimplexPoint next = learners::eg_step(refine.rows[j], total_grad[j], pass_step);
      for (int c = 0; c < k; ++c)
        next.weights[c] = 0.999 * next.weights[c] + 0.001 / k;
      refine.rows[j] = next;
    }
    const double refined_loss = total_stream_loss(refine, request_stream, window);
    if (refined_loss < best_loss) {
      best_loss = refined_loss;
      best = refine;
    }
  }

  (void)best_loss;
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& s : request_stream)
    comp_rounds.push_back(window_loss(best, s, window));
  result.ledger.set_comparator(std::move(comp_rounds));
  result.ledger.bound_value =
      wd * n * std::sqrt(2.0 * T * std::log(static_cast<double>(k)));
  result.final_stack = std::move(stack);
  return result;
}

MetricSpace read_metric(std::istream& in) {
  int k = 0;
  if (!(in >> k) || k <= 0) throw std::runtime_error("metric read: malformed point count");
  std::vector<std::vector<double>> m(k, std::vector<double>(k));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (!(in >> m[a][b])) throw std::runtime_error("metric read: malformed matrix");
  return MetricSpace(std::move(m));
}

void write_metric(std::ostream& out, const MetricSpace& metric) {
  out.precision(17);
  const int k = metric.points();
  out << k << '\n';
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) out << metric.d(a, b) << (b + 1 == k ? '\n' : ' ');
  }
}

std::vector<std::vector<int>> read_request_sequences(std::istream& in) {
  std::vector<std::vector<int>> sequences;
  std::vector<int> current;
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    if (trimmed.empty()) {
      if (!current.empty()) sequences.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(std::stoi(trimmed));
  }
  if (!current.empty()) sequences.push_back(std::move(current));
  return sequences;
}

void write_request_sequences(std::ostream& out,
                             const std::vector<std::vector<int>>& sequences) {
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (i > 0) out << '\n';
    for (int s : sequences[i]) out << s << '\n';
  }
}

}  // namespace predlearn::migration
