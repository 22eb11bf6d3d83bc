#include "predlearn/scheduling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace predlearn::scheduling {

void AssignmentInstance::validate() const {
  if (machines <= 0) throw std::invalid_argument("assignment: no machines");
  if (static_cast<int>(good_weights.size()) != machines)
    throw std::invalid_argument("assignment: weight dimension mismatch");
  for (double w : good_weights)
    if (!(w > 0.0)) throw std::invalid_argument("assignment: nonpositive weight");
  features.validate();
  for (const auto& job : jobs) {
    if (!(job.size > 0.0)) throw std::invalid_argument("assignment: nonpositive job size");
    if (job.allowed.empty()) throw std::invalid_argument("assignment: empty allowed set");
    for (int i : job.allowed)
      if (i < 0 || i >= machines)
        throw std::invalid_argument("assignment: allowed machine out of range");
  }
}

double RoundRobinInstance::prediction_error() const {
  double eta = 0.0;
  for (std::size_t j = 0; j < true_sizes.size(); ++j)
    eta += std::fabs(true_sizes[j] - predicted_sizes[j]);
  return eta;
}

void RoundRobinInstance::validate() const {
  if (true_sizes.empty() || true_sizes.size() != predicted_sizes.size())
    throw std::invalid_argument("round robin: size vectors mismatch");
  for (std::size_t j = 0; j < true_sizes.size(); ++j)
    if (!(true_sizes[j] > 0.0) || !(predicted_sizes[j] > 0.0))
      throw std::invalid_argument("round robin: sizes must be positive");
}

namespace {

Vec log_weights_of(std::span<const double> weights) {
  Vec lw(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0))
      throw std::invalid_argument("logit_loss: nonpositive weight");
    lw[i] = std::log(weights[i]);
  }
  return lw;
}

}  // namespace

double logit_loss(std::span<const double> x, std::span<const double> weights) {
  check_same_size(x, weights, "logit_loss");
  const Vec lw = log_weights_of(weights);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::fabs(x[i] - lw[i]));
  return m;
}

Vec logit_loss_subgradient(std::span<const double> x, std::span<const double> weights) {
  const Vec lw = log_weights_of(weights);
  return learners::linf_subgradient(x, lw);
}

double truncated_logit_loss(std::span<const double> x, std::span<const double> weights,
                            int machines) {
  return std::min(logit_loss(x, weights), std::log(static_cast<double>(machines)));
}

double fractional_assign(const AssignmentInstance& instance,
                         std::span<const double> weights) {
  instance.validate();
  if (static_cast<int>(weights.size()) != instance.machines)
    throw std::invalid_argument("fractional_assign: weight dimension mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("fractional_assign: nonpositive weight");
  Vec load(instance.machines, 0.0);
  for (const auto& job : instance.jobs) {
    double denom = 0.0;
    for (int i : job.allowed) denom += weights[i];
    for (int i : job.allowed) load[i] += job.size * weights[i] / denom;
  }
  return *std::max_element(load.begin(), load.end());
}

namespace {

/// Dinic max flow with real capacities, small enough for these instances.
struct FlowNetwork {
  struct Arc {
    int to;
    double cap;
    int rev;
  };
  std::vector<std::vector<Arc>> g;
  std::vector<int> level, iter;

  explicit FlowNetwork(int n) : g(n), level(n), iter(n) {}

  void add_edge(int a, int b, double cap) {
    g[a].push_back({b, cap, static_cast<int>(g[b].size())});
    g[b].push_back({a, 0.0, static_cast<int>(g[a].size()) - 1});
  }

  bool bfs(int s, int t) {
    std::fill(level.begin(), level.end(), -1);
    std::vector<int> queue{s};
    level[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int v = queue[h];
      for (const Arc& a : g[v])
        if (a.cap > 1e-12 && level[a.to] < 0) {
          level[a.to] = level[v] + 1;
          queue.push_back(a.to);
        }
    }
    return level[t] >= 0;
  }

  double dfs(int v, int t, double f) {
    if (v == t) return f;
    for (int& i = iter[v]; i < static_cast<int>(g[v].size()); ++i) {
      Arc& a = g[v][i];
      if (a.cap > 1e-12 && level[v] < level[a.to]) {
        const double d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0.0) {
          a.cap -= d;
          g[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  }

  double max_flow(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(iter.begin(), iter.end(), 0);
      double f;
      while ((f = dfs(s, t, std::numeric_limits<double>::infinity())) > 0.0) flow += f;
    }
    return flow;
  }
};

bool makespan_feasible(const AssignmentInstance& inst, double makespan, double total) {
  const int jobs = static_cast<int>(inst.jobs.size());
  const int source = 0, sink = 1 + jobs + inst.machines;
  FlowNetwork net(sink + 1);
  for (int j = 0; j < jobs; ++j) {
    net.add_edge(source, 1 + j, inst.jobs[j].size);
    for (int i : inst.jobs[j].allowed)
      net.add_edge(1 + j, 1 + jobs + i, std::numeric_limits<double>::infinity());
  }
  for (int i = 0; i < inst.machines; ++i)
    net.add_edge(1 + jobs + i, sink, makespan);
  return net.max_flow(source, sink) >= total - 1e-9 * std::max(1.0, total);
}

}  // namespace

double offline_fractional_opt(const AssignmentInstance& instance) {
  instance.validate();
  double total = 0.0;
  for (const auto& job : instance.jobs) total += job.size;
  if (total == 0.0) return 0.0;
  double lo = 0.0, hi = total;
  for (int it = 0; it < 60 && hi - lo > 1e-9 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (makespan_feasible(instance, mid, total))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double offline_fractional_opt_by_cuts(const AssignmentInstance& instance) {
  instance.validate();
  if (instance.machines > 20)
    throw std::invalid_argument("offline_fractional_opt_by_cuts: too many machines");
  std::vector<unsigned> masks(instance.jobs.size(), 0);
  for (std::size_t j = 0; j < instance.jobs.size(); ++j)
    for (int i : instance.jobs[j].allowed) masks[j] |= 1u << i;
  double best = 0.0;
  for (unsigned s = 1; s < (1u << instance.machines); ++s) {
    double confined = 0.0;
    for (std::size_t j = 0; j < instance.jobs.size(); ++j)
      if ((masks[j] & ~s) == 0) confined += instance.jobs[j].size;
    best = std::max(best, confined / std::popcount(s));
  }
  return best;
}

namespace {

Vec matrix_subgradient(const Mat& a, const WeightFeatureRound& round) {
  const Vec x = a.multiply(round.features);
  const Vec lw = log_weights_of(round.weights);
  const Vec dir = learners::linf_subgradient(x, lw);  // one-hot row selector
  Vec g(a.a.size(), 0.0);
  for (int i = 0; i < a.rows; ++i) {
    if (dir[i] == 0.0) continue;
    for (int k = 0; k < a.cols; ++k)
      g[std::size_t(i) * a.cols + k] = dir[i] * round.features[k];
  }
  return g;
}

double stream_loss(const Mat& a, const std::vector<WeightFeatureRound>& stream) {
  double total = 0.0;
  for (const auto& r : stream) total += logit_loss(a.multiply(r.features), r.weights);
  return total;
}

Mat from_flat(int rows, int cols, Vec flat) {
  Mat m(rows, cols);
  m.a = std::move(flat);
  return m;
}

void validate_stream(const std::vector<WeightFeatureRound>& stream, int machines,
                     int f_dim) {
  if (stream.empty()) throw std::invalid_argument("learner: empty stream");
  for (const auto& r : stream) {
    if (static_cast<int>(r.weights.size()) != machines ||
        static_cast<int>(r.features.size()) != f_dim)
      throw std::invalid_argument("learner: round dimension mismatch");
    learners::SimplexPoint(r.features).validate();
  }
}

}  // namespace

MatrixLearnerResult ktoco_logit_learner(const std::vector<WeightFeatureRound>& stream,
                                        int machines, int f_dim,
                                        const Mat& comparator) {
  validate_stream(stream, machines, f_dim);
  if (comparator.rows != machines || comparator.cols != f_dim)
    throw std::invalid_argument("ktoco_logit_learner: comparator shape mismatch");
  const int T = static_cast<int>(stream.size());

  MatrixLearnerResult out;
  learners::CoinBettingState state(machines * f_dim);
  Vec sum(std::size_t(machines) * f_dim, 0.0);
  Mat current(machines, f_dim);

  for (const auto& round : stream) {
    const double loss = logit_loss(current.multiply(round.features), round.weights);
    out.ledger.record(loss, digest_vector(current.a));
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += current.a[i];
    const Vec g = matrix_subgradient(current, round);
    auto [next_state, next_point] = learners::ktoco_step(std::move(state), g);
    state = std::move(next_state);
    current = from_flat(machines, f_dim, std::move(next_point));
  }

  out.final_matrix = current;
  for (double& v : sum) v /= static_cast<double>(T);
  out.average_matrix = from_flat(machines, f_dim, std::move(sum));

  const double norm = comparator.frobenius_norm();
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& round : stream)
    comp_rounds.push_back(logit_loss(comparator.multiply(round.features), round.weights));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value =
      norm * std::sqrt(T * std::log(1.0 + 24.0 * double(T) * T * norm * norm)) + 1.0;
  return out;
}

MatrixLearnerResult ogd_bounded_matrix_learner(
    const std::vector<WeightFeatureRound>& stream, int machines, int f_dim,
    double bound_b, const OgdMatrixOptions& options) {
  validate_stream(stream, machines, f_dim);
  if (!(bound_b >= 0.0))
    throw std::invalid_argument("ogd_bounded_matrix_learner: negative box bound");
  const int T = static_cast<int>(stream.size());
  const int dim = machines * f_dim;
  const learners::BoxDomain box = learners::BoxDomain::centered_cube(dim, bound_b);
  const double step = bound_b * std::sqrt(static_cast<double>(dim) / (2.0 * T));

  MatrixLearnerResult out;
  Mat current(machines, f_dim);
  Vec sum(std::size_t(dim), 0.0);

  for (const auto& round : stream) {
    const double loss = logit_loss(current.multiply(round.features), round.weights);
    out.ledger.record(loss, digest_vector(current.a));
    for (int i = 0; i < dim; ++i) sum[i] += current.a[i];
    if (bound_b > 0.0) {
      const Vec g = matrix_subgradient(current, round);
      current = from_flat(machines, f_dim, learners::ogd_step(current.a, g, step, box));
    }
  }

  out.final_matrix = current;
  Vec avg = sum;
  for (double& v : avg) v /= static_cast<double>(T);
  out.average_matrix = from_flat(machines, f_dim, std::move(avg));

  // Hindsight comparator over the box: best candidate refined by projected
  // subgradient passes on the summed loss.
  Mat best(machines, f_dim);
  double best_loss = stream_loss(best, stream);
  std::vector<Mat> candidates{out.final_matrix, out.average_matrix};
  if (options.comparator_hint != nullptr) {
    Mat clipped = *options.comparator_hint;
    for (double& v : clipped.a) v = std::clamp(v, -bound_b, bound_b);
    candidates.push_back(std::move(clipped));
  }
  for (const Mat& cand : candidates) {
    const double l = stream_loss(cand, stream);
    if (l < best_loss) {
      best_loss = l;
      best = cand;
    }
  }
  if (bound_b > 0.0) {
    Mat refine = best;
    const double diameter = 2.0 * bound_b * std::sqrt(static_cast<double>(dim));
    for (int pass = 1; pass <= options.offline_comparator_passes; ++pass) {
      Vec g_total(dim, 0.0);
      for (const auto& round : stream) {
        const Vec g = matrix_subgradient(refine, round);
        for (int i = 0; i < dim; ++i) g_total[i] += g[i];
      }
      const double pass_step = diameter / (T * std::sqrt(static_cast<double>(pass)));
      refine = from_flat(machines, f_dim,
                         learners::ogd_step(refine.a, g_total, pass_step, box));
      const double l = stream_loss(refine, stream);
      if (l < best_loss) {
        best_loss = l;
        best = refine;
      }
    }
  }

  (void)best_loss;
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& round : stream)
    comp_rounds.push_back(logit_loss(best.multiply(round.features), round.weights));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value = bound_b * std::sqrt(2.0 * machines * f_dim * T);
  return out;
}

double rr_bound(double lambda, double eta, double n) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("rr_bound: lambda must lie in (0,1)");
  if (!(eta >= 0.0) || !(n > 0.0)) throw std::invalid_argument("rr_bound: bad arguments");
  // Written as quality * growth so the generic trade-off template evaluates
  // to the identical floating-point value.
  return std::min((1.0 + 2.0 * eta / n) * (1.0 / (1.0 - lambda)), 2.0 / lambda);
}

double rr_simulate(const RoundRobinInstance& instance, double lambda) {
  instance.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("rr_simulate: lambda must lie in [0,1]");
  const int n = instance.jobs();

  std::vector<double> remaining = instance.true_sizes;
  std::vector<int> alive(n);
  std::iota(alive.begin(), alive.end(), 0);
  const double scale =
      *std::max_element(remaining.begin(), remaining.end()) * 1e-12;

  double clock = 0.0, total_completion = 0.0;
  while (!alive.empty()) {
    const int k = static_cast<int>(alive.size());
    int preferred = alive.front();
    for (int j : alive)
      if (instance.predicted_sizes[j] < instance.predicted_sizes[preferred])
        preferred = j;

    double dt = std::numeric_limits<double>::infinity();
    int first_done = -1;
    for (int j : alive) {
      const double rate = lambda / k + (j == preferred ? 1.0 - lambda : 0.0);
      if (rate <= 0.0) continue;
      const double t = remaining[j] / rate;
      if (t < dt) {
        dt = t;
        first_done = j;
      }
    }
    clock += dt;
    for (int j : alive) {
      const double rate = lambda / k + (j == preferred ? 1.0 - lambda : 0.0);
      remaining[j] -= dt * rate;
    }
    remaining[first_done] = 0.0;

    std::vector<int> still;
    for (int j : alive) {
      if (remaining[j] <= scale) {
        total_completion += clock;
      } else {
        still.push_back(j);
      }
    }
    alive.swap(still);
  }

  std::vector<double> sorted = instance.true_sizes;
  std::sort(sorted.begin(), sorted.end());
  double cum = 0.0, opt = 0.0;
  for (double s : sorted) {
    cum += s;
    opt += cum;
  }
  return total_completion / opt;
}

ForecasterResult lambda_forecaster(const std::vector<LambdaRound>& stream, double cap_b,
                                   Rng& rng, const ForecasterOptions& options) {
  if (stream.empty()) throw std::invalid_argument("lambda_forecaster: empty stream");
  if (!(cap_b > 0.0)) throw std::invalid_argument("lambda_forecaster: cap must be positive");
  for (const auto& r : stream)
    if (!(r.n > 0.0) || r.eta / r.n > cap_b + 1e-9)
      throw std::invalid_argument("lambda_forecaster: round violates the error cap");
  const int T = static_cast<int>(stream.size());
  const int grid = options.grid_points;

  ForecasterResult out;
  out.final_density =
      learners::GridDensity::uniform_1d(1.0 / 1024.0, 1.0 - 1.0 / 1024.0, grid);
  const double loss_cap = 3.0 * (1.0 + 2.0 * cap_b);
  const double step =
      options.step_override > 0.0
          ? options.step_override
          : std::sqrt(8.0 * std::log(static_cast<double>(grid)) /
                      (T * loss_cap * loss_cap));

  for (const auto& round : stream) {
    auto loss_at = [&](double lambda, double) {
      return rr_bound(lambda, round.eta, round.n);
    };
    const double sampled = forecaster_sample(out.final_density, rng).first;
    out.ledger.record(forecaster_expected_loss(out.final_density, loss_at),
                      digest_value(sampled));
    out.final_density = forecaster_update(std::move(out.final_density), loss_at, step);
  }

  double best = std::numeric_limits<double>::infinity();
  double best_lambda = 0.5;
  auto consider = [&](double lambda) {
    double total = 0.0;
    for (const auto& round : stream) total += rr_bound(lambda, round.eta, round.n);
    if (total < best) {
      best = total;
      best_lambda = lambda;
    }
  };
  const int ref = options.reference_grid_points;
  for (int k = 1; k <= ref; ++k) consider(static_cast<double>(k) / (ref + 1));
  for (std::size_t i = 0; i < out.final_density.size(); ++i)
    consider(out.final_density.xs[i]);

  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& round : stream)
    comp_rounds.push_back(rr_bound(best_lambda, round.eta, round.n));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value =
      9.0 * cap_b * (1.0 + std::sqrt(0.5 * T * std::log(static_cast<double>(T))));
  return out;
}

AssignmentInstance read_assignment_instance(std::istream& in) {
  AssignmentInstance inst;
  std::string line;
  auto next_content_line = [&](std::string& target) {
    while (std::getline(in, target)) {
      if (target.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_content_line(line)) throw std::runtime_error("assignment read: missing header");
  int f_dim = 0;
  {
    std::istringstream h(line);
    if (!(h >> inst.machines >> f_dim))
      throw std::runtime_error("assignment read: malformed header");
  }
  if (!next_content_line(line)) throw std::runtime_error("assignment read: missing weights");
  {
    std::istringstream w(line);
    inst.good_weights.resize(inst.machines);
    for (double& v : inst.good_weights)
      if (!(w >> v)) throw std::runtime_error("assignment read: malformed weight line");
  }
  if (!next_content_line(line)) throw std::runtime_error("assignment read: missing features");
  {
    std::istringstream f(line);
    Vec feat(f_dim);
    for (double& v : feat)
      if (!(f >> v)) throw std::runtime_error("assignment read: malformed feature line");
    inst.features = learners::SimplexPoint(std::move(feat));
  }
  // Jobs run to the next blank line or end of input.
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) break;
    std::istringstream j(line);
    AssignmentInstance::Job job;
    if (!(j >> job.size)) throw std::runtime_error("assignment read: malformed job line");
    int machine;
    while (j >> machine) job.allowed.push_back(machine);
    inst.jobs.push_back(std::move(job));
  }
  inst.validate();
  return inst;
}

void write_assignment_instance(std::ostream& out, const AssignmentInstance& inst) {
  out.precision(17);
  out << inst.machines << ' ' << inst.features.dim() << '\n';
  for (int i = 0; i < inst.machines; ++i)
    out << inst.good_weights[i] << (i + 1 == inst.machines ? '\n' : ' ');
  for (int k = 0; k < inst.features.dim(); ++k)
    out << inst.features.weights[k] << (k + 1 == inst.features.dim() ? '\n' : ' ');
  for (const auto& job : inst.jobs) {
    out << job.size;
    for (int i : job.allowed) out << ' ' << i;
    out << '\n';
  }
  out << '\n';
}

RoundRobinInstance read_rr_instance(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n <= 0) throw std::runtime_error("rr read: malformed job count");
  RoundRobinInstance inst;
  inst.true_sizes.resize(n);
  inst.predicted_sizes.resize(n);
  for (double& v : inst.true_sizes)
    if (!(in >> v)) throw std::runtime_error("rr read: malformed true sizes");
  for (double& v : inst.predicted_sizes)
    if (!(in >> v)) throw std::runtime_error("rr read: malformed predicted sizes");
  inst.validate();
  return inst;
}

void write_rr_instance(std::ostream& out, const RoundRobinInstance& inst) {
  out.precision(17);
  out << inst.jobs() << '\n';
  for (int j = 0; j < inst.jobs(); ++j)
    out << inst.true_sizes[j] << (j + 1 == inst.jobs() ? '\n' : ' ');
  for (int j = 0; j < inst.jobs(); ++j)
    out << inst.predicted_sizes[j] << (j + 1 == inst.jobs() ? '\n' : ' ');
}

}  // namespace predlearn::scheduling
