#include "predlearn/stream.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace predlearn::harness {

StreamKind parse_stream_kind(const std::string& name) {
  if (name == "iid") return StreamKind::iid;
  if (name == "drifting") return StreamKind::drifting;
  if (name == "adversarial" || name == "adversarial-worstcase")
    return StreamKind::adversarial;
  if (name == "file") return StreamKind::file;
  throw std::invalid_argument("unknown stream kind: " + name);
}

std::string stream_kind_name(StreamKind kind) {
  switch (kind) {
    case StreamKind::iid: return "iid";
    case StreamKind::drifting: return "drifting";
    case StreamKind::adversarial: return "adversarial";
    case StreamKind::file: return "file";
  }
  return "unknown";
}

Vec random_simplex_point(int dim, Rng& rng) {
  Vec f(dim);
  double sum = 0.0;
  for (double& v : f) {
    double u;
    do {
      u = rng.uniform01();
    } while (u == 0.0);
    v = -std::log(u);
    sum += v;
  }
  for (double& v : f) v /= sum;
  return f;
}

namespace {

matching::BipartiteInstance complete_instance(int side,
                                              const std::vector<long long>& costs) {
  matching::BipartiteInstance g;
  g.n_left = g.n_right = side;
  g.edges.reserve(costs.size());
  int k = 0;
  for (int u = 0; u < side; ++u)
    for (int v = 0; v < side; ++v) g.edges.push_back({u, v, costs[k++]});
  return g;
}

std::vector<long long> random_costs(int side, long long cap, Rng& rng) {
  std::vector<long long> c(std::size_t(side) * side);
  for (auto& v : c) v = rng.uniform_int(0, cap);
  return c;
}

matching::DemandVector balanced_demands(int side, long long cap, Rng& rng) {
  matching::DemandVector d;
  d.b.resize(2 * std::size_t(side));
  long long left = 0;
  for (int i = 0; i < side; ++i) {
    d.b[i] = rng.uniform_int(1, cap);
    left += d.b[i];
  }
  // Fill the right side to the same total, each entry in [1, cap].
  long long remaining = left;
  for (int j = 0; j < side; ++j) {
    const int slots_after = side - j - 1;
    const long long lo = std::max<long long>(1, remaining - slots_after * cap);
    const long long hi = std::min<long long>(cap, remaining - slots_after);
    d.b[std::size_t(side) + j] = rng.uniform_int(lo, hi);
    remaining -= d.b[std::size_t(side) + j];
  }
  return d;
}

}  // namespace

std::vector<MatchingRound> matching_stream(StreamKind kind, int rounds,
                                           const MatchingStreamParams& params,
                                           Rng& rng) {
  if (kind == StreamKind::file)
    throw std::invalid_argument("matching_stream: file mode is loaded elsewhere");
  const int side = params.nodes_per_side;
  const long long cap = params.cost_cap;

  // Base patterns for the drifting / adversarial regimes.
  const std::vector<long long> base_a = random_costs(side, cap, rng);
  const std::vector<long long> base_b = random_costs(side, cap, rng);

  std::vector<MatchingRound> out;
  out.reserve(rounds);
  for (int t = 0; t < rounds; ++t) {
    std::vector<long long> costs;
    switch (kind) {
      case StreamKind::iid:
        costs = random_costs(side, cap, rng);
        break;
      case StreamKind::drifting: {
        const auto& base = t < rounds / 2 ? base_a : base_b;
        costs = base;
        for (auto& c : costs) {
          c += rng.uniform_int(-1, 1);
          c = std::clamp<long long>(c, 0, cap);
        }
        break;
      }
      case StreamKind::adversarial:
        costs = t % 2 == 0 ? base_a : base_b;
        break;
      case StreamKind::file:
        break;
    }
    MatchingRound round;
    round.instance = complete_instance(side, costs);
    if (params.demand_cap > 1) {
      round.demand = balanced_demands(side, params.demand_cap, rng);
    } else {
      round.demand.b.assign(2 * std::size_t(side), 1);
    }
    round.features = params.f_dim == 1 ? Vec{1.0}
                                       : random_simplex_point(params.f_dim, rng);
    out.push_back(std::move(round));
  }
  return out;
}

MigrationStream migration_stream(StreamKind kind, int rounds,
                                 const MigrationStreamParams& params, Rng& rng) {
  if (kind == StreamKind::file)
    throw std::invalid_argument("migration_stream: file mode is loaded elsewhere");
  const int k = params.points;
  const int n = params.sequence_length;

  // Euclidean points in the unit square; the triangle inequality is free.
  std::vector<double> px(k), py(k);
  for (int i = 0; i < k; ++i) {
    px[i] = rng.uniform01();
    py[i] = rng.uniform01();
  }
  std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      dist[a][b] = std::hypot(px[a] - px[b], py[a] - py[b]);

  std::vector<int> pattern_a(n), pattern_b(n);
  for (int j = 0; j < n; ++j) {
    pattern_a[j] = static_cast<int>(rng.uniform_below(k));
    pattern_b[j] = static_cast<int>(rng.uniform_below(k));
  }

  MigrationStream out{migration::MetricSpace(std::move(dist)), {}};
  out.request_sequences.reserve(rounds);
  for (int t = 0; t < rounds; ++t) {
    const std::vector<int>* base = &pattern_a;
    if (kind == StreamKind::drifting && t >= rounds / 2) base = &pattern_b;
    if (kind == StreamKind::adversarial && t % 2 == 1) base = &pattern_b;
    std::vector<int> s(n);
    for (int j = 0; j < n; ++j) {
      s[j] = rng.uniform01() < params.stickiness
                 ? (*base)[j]
                 : static_cast<int>(rng.uniform_below(k));
    }
    out.request_sequences.push_back(std::move(s));
  }
  return out;
}

namespace {

Mat planted_matrix(int machines, int f_dim, double norm, Rng& rng) {
  Mat a(machines, f_dim);
  for (double& v : a.a) v = rng.uniform_real(-1.0, 1.0);
  const double raw = a.frobenius_norm();
  if (raw > 0.0)
    for (double& v : a.a) v *= norm / raw;
  return a;
}

}  // namespace

SchedulingStream scheduling_stream(StreamKind kind, int rounds,
                                   const SchedulingStreamParams& params, Rng& rng) {
  if (kind == StreamKind::file)
    throw std::invalid_argument("scheduling_stream: file mode is loaded elsewhere");
  SchedulingStream out{{}, planted_matrix(params.machines, params.f_dim,
                                          params.comparator_norm, rng)};
  const Mat alt = planted_matrix(params.machines, params.f_dim,
                                 params.comparator_norm, rng);
  const Vec fixed_feature_a = random_simplex_point(params.f_dim, rng);
  const Vec fixed_feature_b = random_simplex_point(params.f_dim, rng);

  out.rounds.reserve(rounds);
  for (int t = 0; t < rounds; ++t) {
    const Mat* map = &out.planted_map;
    if (kind == StreamKind::drifting && t >= rounds / 2) map = &alt;
    if (kind == StreamKind::adversarial) map = t % 2 == 0 ? &out.planted_map : &alt;

    scheduling::WeightFeatureRound round;
    round.features = kind == StreamKind::adversarial
                         ? (t % 2 == 0 ? fixed_feature_a : fixed_feature_b)
                         : random_simplex_point(params.f_dim, rng);
    Vec logits = map->multiply(round.features);
    round.weights.resize(params.machines);
    for (int i = 0; i < params.machines; ++i) {
      double v = logits[i];
      if (kind != StreamKind::adversarial)
        v += rng.uniform_real(-params.noise, params.noise);
      v = std::clamp(v, -params.log_weight_cap, params.log_weight_cap);
      round.weights[i] = std::exp(v);
    }
    out.rounds.push_back(std::move(round));
  }
  return out;
}

std::vector<scheduling::LambdaRound> rr_stream(StreamKind kind, int rounds,
                                               const RrStreamParams& params,
                                               Rng& rng) {
  if (kind == StreamKind::file)
    throw std::invalid_argument("rr_stream: file mode is loaded elsewhere");
  std::vector<scheduling::LambdaRound> out;
  out.reserve(rounds);
  for (int t = 0; t < rounds; ++t) {
    scheduling::LambdaRound r;
    r.n = static_cast<double>(rng.uniform_int(params.min_jobs, params.max_jobs));
    double quality;
    switch (kind) {
      case StreamKind::iid:
        quality = rng.uniform01();
        break;
      case StreamKind::drifting:
        quality = t < rounds / 2 ? 0.1 * rng.uniform01()
                                 : 0.9 + 0.1 * rng.uniform01();
        break;
      case StreamKind::adversarial:
        quality = t % 2 == 0 ? 0.0 : 1.0;
        break;
      default:
        quality = 0.0;
    }
    r.eta = quality * params.error_cap * r.n;
    out.push_back(r);
  }
  return out;
}

scheduling::RoundRobinInstance random_rr_instance(int jobs, double size_cap,
                                                  double error_scale, Rng& rng) {
  scheduling::RoundRobinInstance inst;
  inst.true_sizes.resize(jobs);
  inst.predicted_sizes.resize(jobs);
  for (int j = 0; j < jobs; ++j) {
    inst.true_sizes[j] = size_cap * (0.05 + 0.95 * rng.uniform01());
    const double noise = error_scale * rng.uniform_real(-1.0, 1.0);
    inst.predicted_sizes[j] = std::max(1e-3, inst.true_sizes[j] + noise);
  }
  return inst;
}

std::vector<skirental::SkiSeason> ski_stream(StreamKind kind, int rounds,
                                             const SkiStreamParams& params,
                                             Rng& rng) {
  if (kind == StreamKind::file)
    throw std::invalid_argument("ski_stream: file mode is loaded elsewhere");
  std::vector<skirental::SkiSeason> out;
  out.reserve(rounds);
  const double n_max = params.days_max;
  for (int t = 0; t < rounds; ++t) {
    skirental::SkiSeason s;
    if (params.discrete) {
      long long lo = 2, hi = static_cast<long long>(n_max);
      if (kind == StreamKind::drifting) {
        if (t < rounds / 2)
          hi = std::max<long long>(2, hi / 4);
        else
          lo = std::max<long long>(2, 3 * hi / 4);
      }
      if (kind == StreamKind::adversarial)
        s.days = t % 2 == 0 ? 2.0 : n_max;
      else
        s.days = static_cast<double>(rng.uniform_int(lo, hi));
      s.buy_price = static_cast<double>(
          rng.uniform_int(1, static_cast<long long>(params.price_max)));
    } else {
      double u;
      do {
        u = rng.uniform01();
      } while (u == 0.0);
      double lo = 1.0, hi = n_max;
      if (kind == StreamKind::drifting) {
        if (t < rounds / 2)
          hi = 1.0 + (n_max - 1.0) / 4.0;
        else
          lo = 1.0 + 3.0 * (n_max - 1.0) / 4.0;
      }
      if (kind == StreamKind::adversarial) {
        lo = t % 2 == 0 ? 1.0 : 1.0 + 0.9 * (n_max - 1.0);
        hi = t % 2 == 0 ? 1.0 + 0.1 * (n_max - 1.0) : n_max;
      }
      s.days = lo + (hi - lo) * u;
      s.buy_price = 1.0 + (params.price_max - 1.0) * rng.uniform01();
    }
    out.push_back(s);
  }
  return out;
}

std::vector<permutations::JobBatch> perm_stream(StreamKind kind, int rounds,
                                                const PermStreamParams& params,
                                                Rng& rng) {
  if (kind == StreamKind::file)
    throw std::invalid_argument("perm_stream: file mode is loaded elsewhere");
  const int n = params.jobs;

  auto random_batch = [&](double heavy_scale, int heavy_job) {
    permutations::JobBatch b;
    b.weights.resize(n);
    b.processing.resize(n);
    for (int j = 0; j < n; ++j) {
      b.weights[j] = params.weight_cap * rng.uniform01();
      b.processing[j] = params.processing_cap * rng.uniform01();
    }
    if (heavy_job >= 0) {
      b.weights[heavy_job] = params.weight_cap * heavy_scale;
      b.processing[heavy_job] = params.processing_cap * heavy_scale;
    }
    return b;
  };

  std::vector<permutations::JobBatch> out;
  out.reserve(rounds);
  const permutations::JobBatch fixed_a = random_batch(1.0, 0);
  const permutations::JobBatch fixed_b = random_batch(1.0, n - 1);
  for (int t = 0; t < rounds; ++t) {
    switch (kind) {
      case StreamKind::iid:
        out.push_back(random_batch(1.0, -1));
        break;
      case StreamKind::drifting:
        out.push_back(random_batch(1.0, t < rounds / 2 ? 0 : n - 1));
        break;
      case StreamKind::adversarial:
        out.push_back(t % 2 == 0 ? fixed_a : fixed_b);
        break;
      default:
        break;
    }
  }
  return out;
}

scheduling::AssignmentInstance planted_assignment_instance(int machines, int f_dim,
                                                           double log_weight_cap,
                                                           Rng& rng) {
  scheduling::AssignmentInstance inst;
  inst.machines = machines;
  inst.good_weights.resize(machines);
  for (double& w : inst.good_weights)
    w = std::exp(rng.uniform_real(-log_weight_cap, log_weight_cap));
  inst.features = learners::SimplexPoint(random_simplex_point(f_dim, rng));

  // Shared jobs split proportionally; singleton filler jobs then level every
  // machine to the same load, which is optimal because it meets the average.
  Vec load(machines, 0.0);
  const int shared = std::max(1, machines / 2 + 1);
  for (int s = 0; s < shared; ++s) {
    scheduling::AssignmentInstance::Job job;
    job.size = 0.5 + rng.uniform01();
    const int span = 2 + static_cast<int>(rng.uniform_below(machines - 1));
    std::vector<int> ids(machines);
    for (int i = 0; i < machines; ++i) ids[i] = i;
    for (int i = 0; i < span; ++i) {
      const int pick = i + static_cast<int>(rng.uniform_below(machines - i));
      std::swap(ids[i], ids[pick]);
      job.allowed.push_back(ids[i]);
    }
    std::sort(job.allowed.begin(), job.allowed.end());
    double denom = 0.0;
    for (int i : job.allowed) denom += inst.good_weights[i];
    for (int i : job.allowed) load[i] += job.size * inst.good_weights[i] / denom;
    inst.jobs.push_back(std::move(job));
  }
  const double level =
      *std::max_element(load.begin(), load.end()) + 0.1 + rng.uniform01();
  for (int i = 0; i < machines; ++i) {
    scheduling::AssignmentInstance::Job filler;
    filler.size = level - load[i];
    filler.allowed = {i};
    inst.jobs.push_back(std::move(filler));
  }
  inst.validate();
  return inst;
}

}  // namespace predlearn::harness
