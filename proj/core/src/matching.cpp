#include "predlearn/matching.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

namespace predlearn::matching {

namespace {

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

/// Min-cost perfect matching on an equal-sided bipartite graph, primal-dual
/// with explicit potentials. Starts from the supplied feasible integer duals
/// and counts augmenting phases plus dual-adjustment rounds.
struct PrimalDual {
  int n;  // nodes per side
  std::vector<std::vector<std::pair<int, long long>>> adj;  // left -> (right, cost)
  std::vector<long long> ul, vr;
  std::vector<int> match_left, match_right;
  long long phases = 0;
  long long adjustments = 0;

  PrimalDual(int side, const std::vector<BipartiteInstance::Edge>& edges,
             std::vector<long long> left_duals, std::vector<long long> right_duals)
      : n(side),
        adj(side),
        ul(std::move(left_duals)),
        vr(std::move(right_duals)),
        match_left(side, -1),
        match_right(side, -1) {
    for (const auto& e : edges) adj[e.u].emplace_back(e.v, e.cost);
  }

  void solve() {
    std::vector<long long> slack(n);
    std::vector<int> slack_from(n), prev_left(n);
    std::vector<char> in_s(n), in_t(n);
    std::vector<int> queue;

    for (int root = 0; root < n; ++root) {
      if (match_left[root] != -1) continue;
      std::fill(slack.begin(), slack.end(), kInf);
      std::fill(slack_from.begin(), slack_from.end(), -1);
      std::fill(prev_left.begin(), prev_left.end(), -1);
      std::fill(in_s.begin(), in_s.end(), 0);
      std::fill(in_t.begin(), in_t.end(), 0);
      queue.clear();
      queue.push_back(root);
      in_s[root] = 1;
      std::size_t scan = 0;
      int free_right = -1;

      while (free_right == -1) {
        while (scan < queue.size()) {
          const int i = queue[scan++];
          for (const auto& [j, c] : adj[i]) {
            if (in_t[j]) continue;
            const long long red = c - ul[i] - vr[j];
            if (red < slack[j]) {
              slack[j] = red;
              slack_from[j] = i;
            }
          }
        }

        int tight = -1;
        for (int j = 0; j < n; ++j)
          if (!in_t[j] && slack[j] == 0) {
            tight = j;
            break;
          }

        if (tight == -1) {
          long long delta = kInf;
          for (int j = 0; j < n; ++j)
            if (!in_t[j]) delta = std::min(delta, slack[j]);
          if (delta >= kInf)
            throw InfeasibleError("matching: no perfect matching exists");
          for (int i = 0; i < n; ++i)
            if (in_s[i]) ul[i] += delta;
          for (int j = 0; j < n; ++j) {
            if (in_t[j])
              vr[j] -= delta;
            else if (slack[j] < kInf)  // unreachable nodes stay unreachable
              slack[j] -= delta;
          }
          ++adjustments;
          continue;
        }

        in_t[tight] = 1;
        prev_left[tight] = slack_from[tight];
        if (match_right[tight] == -1) {
          free_right = tight;
        } else {
          const int i = match_right[tight];
          if (!in_s[i]) {
            in_s[i] = 1;
            queue.push_back(i);
          }
        }
      }

      // Flip the alternating path ending at the free right node.
      int j = free_right;
      while (j != -1) {
        const int i = prev_left[j];
        const int next = match_left[i];
        match_left[i] = j;
        match_right[j] = i;
        j = next;
      }
      ++phases;
    }
  }
};

SolveReport solve_from_integer_duals(const BipartiteInstance& g,
                                     const std::vector<long long>& duals) {
  g.validate();
  if (g.n_left != g.n_right)
    throw InfeasibleError("matching: sides differ, no perfect matching exists");
  const int n = g.n_left;
  std::vector<long long> left(duals.begin(), duals.begin() + n);
  std::vector<long long> right(duals.begin() + n, duals.end());

  PrimalDual pd(n, g.edges, std::move(left), std::move(right));
  pd.solve();

  // Recover edge costs for the matched pairs (parallel edges keep the min).
  std::vector<std::vector<long long>> cost(n, std::vector<long long>(n, kInf));
  for (const auto& e : g.edges) cost[e.u][e.v] = std::min(cost[e.u][e.v], e.cost);

  SolveReport report;
  report.iterations = pd.phases + pd.adjustments;
  report.optimal_duals.resize(2 * std::size_t(n));
  for (int i = 0; i < n; ++i) report.optimal_duals[i] = static_cast<double>(pd.ul[i]);
  for (int j = 0; j < n; ++j)
    report.optimal_duals[std::size_t(n) + j] = static_cast<double>(pd.vr[j]);
  for (int i = 0; i < n; ++i) {
    const int j = pd.match_left[i];
    report.matching.emplace_back(i, j);
    report.objective += cost[i][j];
  }
  return report;
}

}  // namespace

void BipartiteInstance::validate() const {
  if (n_left < 0 || n_right < 0) throw std::invalid_argument("instance: negative side size");
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n_left || e.v < 0 || e.v >= n_right)
      throw std::invalid_argument("instance: edge endpoint out of range");
    if (e.cost < 0) throw std::invalid_argument("instance: negative edge cost");
  }
}

long long DemandVector::max_demand() const {
  long long m = 0;
  for (long long d : b) m = std::max(m, d);
  return m;
}

void DemandVector::validate(const BipartiteInstance& g) const {
  if (static_cast<int>(b.size()) != g.total_nodes())
    throw std::invalid_argument("demands: size mismatch");
  long long left = 0, right = 0;
  for (int i = 0; i < g.n_left; ++i) {
    if (b[i] < 0) throw std::invalid_argument("demands: negative demand");
    left += b[i];
  }
  for (int j = 0; j < g.n_right; ++j) {
    if (b[g.n_left + j] < 0) throw std::invalid_argument("demands: negative demand");
    right += b[g.n_left + j];
  }
  if (left != right)
    throw InfeasibleError("demands: left and right totals differ");
}

std::vector<long long> round_to_integer(std::span<const double> y) {
  std::vector<long long> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]))
      throw std::invalid_argument("round_to_integer: non-finite entry");
    out[i] = std::llround(y[i]);  // llround breaks halves away from zero
  }
  return out;
}

std::vector<long long> repair_duals(const BipartiteInstance& g,
                                    std::vector<long long> duals) {
  if (static_cast<int>(duals.size()) != g.total_nodes())
    throw std::invalid_argument("repair_duals: size mismatch");
  for (const auto& e : g.edges) {
    const long long violation = duals[e.u] + duals[std::size_t(g.n_left) + e.v] - e.cost;
    if (violation > 0) duals[e.u] -= violation;
  }
  return duals;
}

SolveReport hungarian_solve(const BipartiteInstance& g) {
  return solve_from_integer_duals(g, std::vector<long long>(g.total_nodes(), 0));
}

SolveReport warmstart_solve(const BipartiteInstance& g,
                            std::span<const double> predicted) {
  if (static_cast<int>(predicted.size()) != g.total_nodes())
    throw std::invalid_argument("warmstart_solve: prediction size mismatch");
  return solve_from_integer_duals(g, repair_duals(g, round_to_integer(predicted)));
}

SolveReport b_matching_solve(const BipartiteInstance& g, const DemandVector& demand,
                             std::span<const double> predicted) {
  g.validate();
  demand.validate(g);
  if (static_cast<int>(predicted.size()) != g.total_nodes())
    throw std::invalid_argument("b_matching_solve: prediction size mismatch");

  // Round and repair on the original graph so all copies of a node share
  // one integer dual, then split nodes into demand-many copies.
  const std::vector<long long> repaired = repair_duals(g, round_to_integer(predicted));

  std::vector<int> left_base(g.n_left + 1, 0), right_base(g.n_right + 1, 0);
  for (int i = 0; i < g.n_left; ++i)
    left_base[i + 1] = left_base[i] + static_cast<int>(demand.b[i]);
  for (int j = 0; j < g.n_right; ++j)
    right_base[j + 1] = right_base[j] + static_cast<int>(demand.b[std::size_t(g.n_left) + j]);
  const int side = left_base[g.n_left];
  if (side != right_base[g.n_right])
    throw InfeasibleError("b-matching: unbalanced demands");

  BipartiteInstance split;
  split.n_left = split.n_right = side;
  std::vector<int> left_origin(side), right_origin(side);
  for (int i = 0; i < g.n_left; ++i)
    for (int k = left_base[i]; k < left_base[i + 1]; ++k) left_origin[k] = i;
  for (int j = 0; j < g.n_right; ++j)
    for (int k = right_base[j]; k < right_base[j + 1]; ++k) right_origin[k] = j;
  for (const auto& e : g.edges)
    for (int a = left_base[e.u]; a < left_base[e.u + 1]; ++a)
      for (int bcopy = right_base[e.v]; bcopy < right_base[e.v + 1]; ++bcopy)
        split.edges.push_back({a, bcopy, e.cost});

  std::vector<long long> split_duals(2 * std::size_t(side));
  for (int a = 0; a < side; ++a) split_duals[a] = repaired[left_origin[a]];
  for (int bcopy = 0; bcopy < side; ++bcopy)
    split_duals[std::size_t(side) + bcopy] =
        repaired[std::size_t(g.n_left) + right_origin[bcopy]];

  SolveReport inner = solve_from_integer_duals(split, split_duals);

  SolveReport report;
  report.objective = inner.objective;
  report.iterations = inner.iterations;
  for (const auto& [a, bcopy] : inner.matching)
    report.matching.emplace_back(left_origin[a], right_origin[bcopy]);
  std::sort(report.matching.begin(), report.matching.end());

  // Per-node duals: maximum over copies is feasible (every copy pair shares
  // the edge constraint) and matches the objective by weak duality.
  const double neg_inf = -std::numeric_limits<double>::infinity();
  report.optimal_duals.assign(g.total_nodes(), neg_inf);
  for (int a = 0; a < side; ++a) {
    double& slot = report.optimal_duals[left_origin[a]];
    slot = std::max(slot, inner.optimal_duals[a]);
  }
  for (int bcopy = 0; bcopy < side; ++bcopy) {
    double& slot = report.optimal_duals[std::size_t(g.n_left) + right_origin[bcopy]];
    slot = std::max(slot, inner.optimal_duals[std::size_t(side) + bcopy]);
  }

  // Zero-demand nodes have no copies; give them the tightest value that
  // keeps every already-assigned incident constraint feasible.
  for (int node = 0; node < g.total_nodes(); ++node) {
    if (report.optimal_duals[node] != neg_inf) continue;
    double value = 0.0;
    for (const auto& e : g.edges) {
      const int u = e.u, v = g.n_left + e.v;
      if (u == node && report.optimal_duals[v] != neg_inf)
        value = std::min(value, static_cast<double>(e.cost) - report.optimal_duals[v]);
      if (v == node && report.optimal_duals[u] != neg_inf)
        value = std::min(value, static_cast<double>(e.cost) - report.optimal_duals[u]);
    }
    report.optimal_duals[node] = value;
  }
  return report;
}

double dual_error(std::span<const double> x, std::span<const double> target,
                  const DemandVector* demand, ErrorNorm norm) {
  check_same_size(x, target, "dual_error");
  switch (norm) {
    case ErrorNorm::l1: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] - target[i]);
      return s;
    }
    case ErrorNorm::weighted_l1: {
      if (demand == nullptr)
        throw std::invalid_argument("dual_error: weighted_l1 requires demands");
      if (demand->b.size() != x.size())
        throw std::invalid_argument("dual_error: demand size mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        s += static_cast<double>(demand->b[i]) * std::fabs(x[i] - target[i]);
      return s;
    }
    case ErrorNorm::linf: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        s = std::max(s, std::fabs(x[i] - target[i]));
      return s;
    }
  }
  throw std::invalid_argument("dual_error: unknown norm");
}

long long brute_force_matching_objective(const BipartiteInstance& g) {
  g.validate();
  if (g.n_left != g.n_right)
    throw InfeasibleError("brute force: sides differ");
  const int n = g.n_left;
  if (n > 9) throw std::invalid_argument("brute force: side too large");
  std::vector<std::vector<long long>> cost(n, std::vector<long long>(n, kInf));
  for (const auto& e : g.edges) cost[e.u][e.v] = std::min(cost[e.u][e.v], e.cost);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long long best = kInf;
  do {
    long long total = 0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (cost[i][perm[i]] >= kInf)
        ok = false;
      else
        total += cost[i][perm[i]];
    }
    if (ok) best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best >= kInf) throw InfeasibleError("brute force: no perfect matching exists");
  return best;
}

long long brute_force_b_matching_objective(const BipartiteInstance& g,
                                           const DemandVector& demand) {
  g.validate();
  demand.validate(g);
  const int nl = g.n_left, nr = g.n_right;

  // Residual right capacities in mixed radix.
  std::size_t states = 1;
  std::vector<std::size_t> radix(nr), stride(nr);
  for (int j = 0; j < nr; ++j) {
    radix[j] = static_cast<std::size_t>(demand.b[std::size_t(nl) + j]) + 1;
    stride[j] = states;
    states *= radix[j];
    if (states > (1u << 22)) throw std::invalid_argument("brute force: state space too large");
  }

  std::vector<std::vector<long long>> cost(nl, std::vector<long long>(nr, kInf));
  for (const auto& e : g.edges) cost[e.u][e.v] = std::min(cost[e.u][e.v], e.cost);

  std::vector<long long> dp(states, kInf), next(states);
  std::size_t full = 0;
  for (int j = 0; j < nr; ++j) full += (radix[j] - 1) * stride[j];
  dp[full] = 0;

  std::vector<std::size_t> caps(nr);
  for (int u = 0; u < nl; ++u) {
    std::fill(next.begin(), next.end(), kInf);
    const long long need = demand.b[u];
    for (std::size_t s = 0; s < states; ++s) {
      if (dp[s] >= kInf) continue;
      for (int j = 0; j < nr; ++j) caps[j] = (s / stride[j]) % radix[j];
      // Distribute this node's demand over its neighbors (DFS on counts).
      struct Frame {
        int j;
        long long remaining;
        std::size_t state;
        long long acc;
      };
      std::vector<Frame> stack{{0, need, s, dp[s]}};
      while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.remaining == 0) {
          // Remaining neighbors take zero units.
          next[f.state] = std::min(next[f.state], f.acc);
          continue;
        }
        if (f.j >= nr) continue;
        const long long cap = static_cast<long long>((f.state / stride[f.j]) % radix[f.j]);
        const long long limit =
            cost[u][f.j] >= kInf ? 0 : std::min(cap, f.remaining);
        for (long long take = 0; take <= limit; ++take) {
          stack.push_back({f.j + 1, f.remaining - take,
                           f.state - static_cast<std::size_t>(take) * stride[f.j],
                           f.acc + take * cost[u][f.j]});
        }
      }
    }
    dp.swap(next);
  }
  if (dp[0] >= kInf) throw InfeasibleError("brute force: no perfect b-matching exists");
  return dp[0];
}

namespace {

double linf_norm_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

DualLearnerResult dual_ogd_learner(const std::vector<DualLearnerRound>& stream,
                                   int nodes, double cost_cap, double demand_cap) {
  if (stream.empty()) throw std::invalid_argument("dual_ogd_learner: empty stream");
  if (!(cost_cap > 0.0) || !(demand_cap > 0.0))
    throw std::invalid_argument("dual_ogd_learner: caps must be positive");
  for (const auto& r : stream) {
    if (static_cast<int>(r.target.size()) != nodes)
      throw std::invalid_argument("dual_ogd_learner: target dimension mismatch");
    if (!r.demand.empty() && static_cast<int>(r.demand.size()) != nodes)
      throw std::invalid_argument("dual_ogd_learner: demand dimension mismatch");
  }
  const int T = static_cast<int>(stream.size());
  const learners::BoxDomain box = learners::BoxDomain::centered_cube(nodes, cost_cap);
  const double step = cost_cap / (demand_cap * std::sqrt(2.0 * T));

  DualLearnerResult out;
  Vec x(nodes, 0.0), sum(nodes, 0.0);
  std::vector<Vec> weight_rows;
  weight_rows.reserve(T);
  for (const auto& round : stream) {
    Vec w(nodes, 1.0);
    if (!round.demand.empty())
      for (int i = 0; i < nodes; ++i) w[i] = static_cast<double>(round.demand[i]);
    double loss = 0.0;
    for (int i = 0; i < nodes; ++i) loss += w[i] * std::fabs(x[i] - round.target[i]);
    out.ledger.record(loss, digest_vector(x));
    for (int i = 0; i < nodes; ++i) sum[i] += x[i];
    const Vec g = learners::l1_subgradient(x, round.target, w);
    x = learners::ogd_step(x, g, step, box);
    weight_rows.push_back(std::move(w));
  }
  out.final_point = x;
  for (double& v : sum) v /= static_cast<double>(T);
  out.average_point = std::move(sum);

  std::vector<Vec> target_rows;
  target_rows.reserve(T);
  for (const auto& round : stream) target_rows.push_back(round.target);
  const auto [comparator, comparator_loss] =
      learners::best_in_hindsight_l1(target_rows, weight_rows, box);
  (void)comparator_loss;
  Vec comp_rounds(T, 0.0);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < nodes; ++i)
      comp_rounds[t] += weight_rows[t][i] * std::fabs(comparator[i] - target_rows[t][i]);
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value = cost_cap * demand_cap * nodes * std::sqrt(2.0 * T);
  return out;
}

LinfLearnerResult linf_ogd_learner(const std::vector<Vec>& targets, double bound_m,
                                   const LinfLearnerOptions& options) {
  if (targets.empty()) throw std::invalid_argument("linf_ogd_learner: empty stream");
  if (!(bound_m > 0.0)) throw std::invalid_argument("linf_ogd_learner: bad bound");
  const int d = static_cast<int>(targets.front().size());
  const int T = static_cast<int>(targets.size());
  const learners::BoxDomain box = learners::BoxDomain::centered_cube(d, bound_m);
  const double step = bound_m * std::sqrt(static_cast<double>(d) / T);

  LinfLearnerResult out;
  Vec x(d, 0.0), sum(d, 0.0);
  for (const Vec& target : targets) {
    if (static_cast<int>(target.size()) != d)
      throw std::invalid_argument("linf_ogd_learner: ragged targets");
    out.ledger.record(linf_norm_diff(x, target), digest_vector(x));
    for (int i = 0; i < d; ++i) sum[i] += x[i];
    const Vec g = learners::linf_subgradient(x, target);
    x = learners::ogd_step(x, g, step, box);
  }
  out.final_point = x;
  for (double& v : sum) v /= static_cast<double>(T);
  out.average_point = sum;

  auto total_loss = [&](const Vec& p) {
    double s = 0.0;
    for (const Vec& target : targets) s += linf_norm_diff(p, target);
    return s;
  };

  // Candidates: coordinatewise median and midrange, the run average, and
  // the final iterate; refined by offline projected subgradient passes.
  Vec median(d, 0.0), midrange(d, 0.0), column(T);
  for (int i = 0; i < d; ++i) {
    for (int t = 0; t < T; ++t) column[t] = targets[t][i];
    std::sort(column.begin(), column.end());
    median[i] = std::clamp(column[T / 2], -bound_m, bound_m);
    midrange[i] =
        std::clamp(0.5 * (column.front() + column.back()), -bound_m, bound_m);
  }
  Vec best(d, 0.0);
  double best_loss = total_loss(best);
  for (const Vec* cand : {&median, &midrange, &out.average_point, &out.final_point}) {
    const double l = total_loss(*cand);
    if (l < best_loss) {
      best_loss = l;
      best = *cand;
    }
  }
  Vec refine = best;
  const double diameter = 2.0 * bound_m * std::sqrt(static_cast<double>(d));
  for (int pass = 1; pass <= options.offline_comparator_passes; ++pass) {
    Vec g_total(d, 0.0);
    for (const Vec& target : targets) {
      const Vec g = learners::linf_subgradient(refine, target);
      for (int i = 0; i < d; ++i) g_total[i] += g[i];
    }
    const double pass_step = diameter / (T * std::sqrt(static_cast<double>(pass)));
    refine = learners::ogd_step(refine, g_total, pass_step, box);
    const double l = total_loss(refine);
    if (l < best_loss) {
      best_loss = l;
      best = refine;
    }
  }

  Vec comp_rounds(T);
  for (int t = 0; t < T; ++t) comp_rounds[t] = linf_norm_diff(best, targets[t]);
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value = bound_m * std::sqrt(2.0 * d * T);
  return out;
}

BipartiteInstance read_instance(std::istream& in) {
  BipartiteInstance g;
  int m = 0;
  if (!(in >> g.n_left >> g.n_right >> m))
    throw std::runtime_error("instance read: malformed header");
  g.edges.resize(m);
  for (int k = 0; k < m; ++k) {
    if (!(in >> g.edges[k].u >> g.edges[k].v >> g.edges[k].cost))
      throw std::runtime_error("instance read: malformed edge line");
  }
  g.validate();
  return g;
}

void write_instance(std::ostream& out, const BipartiteInstance& g) {
  out << g.n_left << ' ' << g.n_right << ' ' << g.edges.size() << '\n';
  for (const auto& e : g.edges) out << e.u << ' ' << e.v << ' ' << e.cost << '\n';
}

DemandVector read_demands(std::istream& in, const BipartiteInstance& g) {
  DemandVector d;
  d.b.resize(g.total_nodes());
  for (auto& v : d.b)
    if (!(in >> v)) throw std::runtime_error("demand read: malformed entry");
  d.validate(g);
  return d;
}

void write_demands(std::ostream& out, const DemandVector& d) {
  for (long long v : d.b) out << v << '\n';
}

}  // namespace predlearn::matching
