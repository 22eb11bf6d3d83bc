#include "predlearn/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace predlearn::features {

void StochasticStack::validate() const {
  for (const Mat& m : maps) {
    if (m.rows <= 0 || m.cols <= 0)
      throw std::invalid_argument("stochastic stack: empty map");
    for (int k = 0; k < m.cols; ++k) {
      double sum = 0.0;
      for (int i = 0; i < m.rows; ++i) {
        if (!(m(i, k) >= 0.0))
          throw std::invalid_argument("stochastic stack: negative entry");
        sum += m(i, k);
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("stochastic stack: column does not sum to 1");
    }
  }
}

StochasticStack StochasticStack::uniform(int n, int k, int f_dim) {
  StochasticStack s;
  s.maps.assign(n, Mat(k, f_dim, 1.0 / k));
  return s;
}

Vec predict_duals(const Mat& a, const FeatureVector& f) {
  f.validate();
  return a.multiply(f.weights);
}

migration::PredictionStack predict_distributions(const StochasticStack& stack,
                                                 const FeatureVector& f) {
  stack.validate();
  f.validate();
  migration::PredictionStack out;
  out.rows.reserve(stack.maps.size());
  for (const Mat& m : stack.maps)
    out.rows.emplace_back(m.multiply(f.weights));
  return out;
}

FeatureVector autoregressive_features(std::span<const int> history, int k,
                                      int order) {
  if (order < 1) throw std::invalid_argument("autoregressive_features: order < 1");
  if (k < 1) throw std::invalid_argument("autoregressive_features: empty point set");
  for (int s : history)
    if (s < 0 || s >= k)
      throw std::invalid_argument("autoregressive_features: request out of range");

  Vec f(std::size_t(order) * k, 0.0);
  const int have = static_cast<int>(history.size());
  for (int block = 0; block < order; ++block) {
    // Block 0 is the oldest of the last `order` requests.
    const int offset = have - order + block;
    if (offset < 0) {
      for (int c = 0; c < k; ++c)
        f[std::size_t(block) * k + c] = 1.0 / (double(order) * k);
    } else {
      f[std::size_t(block) * k + history[offset]] = 1.0 / order;
    }
  }
  return FeatureVector(std::move(f));
}

namespace {

double weighted_l1(std::span<const double> x, std::span<const double> target,
                   const std::vector<long long>& demand) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = demand.empty() ? 1.0 : static_cast<double>(demand[i]);
    s += w * std::fabs(x[i] - target[i]);
  }
  return s;
}

double dual_stream_loss(const Mat& a, const std::vector<DualFeedbackRound>& stream) {
  double total = 0.0;
  for (const auto& r : stream)
    total += weighted_l1(a.multiply(r.features), r.target_dual, r.demand);
  return total;
}

Vec dual_matrix_subgradient(const Mat& a, const DualFeedbackRound& round) {
  const Vec x = a.multiply(round.features);
  Vec g(a.a.size(), 0.0);
  for (int i = 0; i < a.rows; ++i) {
    const double w =
        round.demand.empty() ? 1.0 : static_cast<double>(round.demand[i]);
    const double d = x[i] - round.target_dual[i];
    const double s = d > 0.0 ? w : (d < 0.0 ? -w : 0.0);
    if (s == 0.0) continue;
    for (int c = 0; c < a.cols; ++c)
      g[std::size_t(i) * a.cols + c] = s * round.features[c];
  }
  return g;
}

Mat from_flat(int rows, int cols, Vec flat) {
  Mat m(rows, cols);
  m.a = std::move(flat);
  return m;
}

}  // namespace

FeatureOgdResult feature_ogd_learner(const std::vector<DualFeedbackRound>& stream,
                                     int nodes, int f_dim, double cost_cap,
                                     double demand_cap,
                                     const FeatureOgdOptions& options) {
  if (stream.empty()) throw std::invalid_argument("feature_ogd_learner: empty stream");
  if (!(cost_cap > 0.0) || !(demand_cap > 0.0))
    throw std::invalid_argument("feature_ogd_learner: caps must be positive");
  for (const auto& r : stream) {
    if (static_cast<int>(r.target_dual.size()) != nodes ||
        static_cast<int>(r.features.size()) != f_dim)
      throw std::invalid_argument("feature_ogd_learner: round dimension mismatch");
    if (!r.demand.empty() && static_cast<int>(r.demand.size()) != nodes)
      throw std::invalid_argument("feature_ogd_learner: demand dimension mismatch");
    learners::SimplexPoint(r.features).validate();
  }
  const int T = static_cast<int>(stream.size());
  const int dim = nodes * f_dim;
  const learners::BoxDomain box = learners::BoxDomain::centered_cube(dim, cost_cap);
  const double step = cost_cap / (demand_cap * std::sqrt(2.0 * T));

  FeatureOgdResult out;
  Mat current(nodes, f_dim);
  Vec sum(std::size_t(dim), 0.0);
  for (const auto& round : stream) {
    const double loss =
        weighted_l1(current.multiply(round.features), round.target_dual, round.demand);
    out.ledger.record(loss, digest_vector(current.a));
    for (int i = 0; i < dim; ++i) sum[i] += current.a[i];
    const Vec g = dual_matrix_subgradient(current, round);
    current = from_flat(nodes, f_dim, learners::ogd_step(current.a, g, step, box));
  }
  out.final_matrix = current;
  for (double& v : sum) v /= static_cast<double>(T);
  out.average_matrix = from_flat(nodes, f_dim, std::move(sum));

  Mat best(nodes, f_dim);
  double best_loss = dual_stream_loss(best, stream);
  std::vector<Mat> candidates{out.final_matrix, out.average_matrix};
  if (options.comparator_hint != nullptr) {
    Mat clipped = *options.comparator_hint;
    for (double& v : clipped.a) v = std::clamp(v, -cost_cap, cost_cap);
    candidates.push_back(std::move(clipped));
  }
  for (const Mat& cand : candidates) {
    const double l = dual_stream_loss(cand, stream);
    if (l < best_loss) {
      best_loss = l;
      best = cand;
    }
  }
  Mat refine = best;
  const double diameter = 2.0 * cost_cap * std::sqrt(static_cast<double>(dim));
  for (int pass = 1; pass <= options.offline_comparator_passes; ++pass) {
    Vec g_total(dim, 0.0);
    for (const auto& round : stream) {
      const Vec g = dual_matrix_subgradient(refine, round);
      for (int i = 0; i < dim; ++i) g_total[i] += g[i];
    }
    const double pass_step =
        diameter / (demand_cap * T * std::sqrt(static_cast<double>(pass)));
    refine = from_flat(nodes, f_dim,
                       learners::ogd_step(refine.a, g_total, pass_step, box));
    const double l = dual_stream_loss(refine, stream);
    if (l < best_loss) {
      best_loss = l;
      best = refine;
    }
  }

  (void)best_loss;
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& round : stream)
    comp_rounds.push_back(
        weighted_l1(best.multiply(round.features), round.target_dual, round.demand));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value =
      cost_cap * demand_cap * nodes * f_dim * std::sqrt(2.0 * T);
  return out;
}

namespace {

migration::PredictionStack stack_from_shared(const Mat& map,
                                             const std::vector<Vec>& rows) {
  migration::PredictionStack p;
  p.rows.reserve(rows.size());
  for (const Vec& f : rows) p.rows.emplace_back(map.multiply(f));
  return p;
}

double shared_stream_loss(const Mat& map, const std::vector<SharedMapRound>& stream,
                          int window) {
  double total = 0.0;
  for (const auto& r : stream)
    total += migration::window_loss(stack_from_shared(map, r.feature_rows),
                                    r.requests, window);
  return total;
}

int window_of(double migration_factor, double gamma, int n) {
  migration::MigrationProblem shape;
  shape.requests.assign(n, 0);
  shape.migration_factor = migration_factor;
  shape.gamma = gamma;
  return shape.window();
}

}  // namespace

SharedMapResult shared_map_learner(const std::vector<SharedMapRound>& stream, int k,
                                   double migration_factor, double gamma,
                                   const MapLearnerOptions& options) {
  if (stream.empty()) throw std::invalid_argument("shared_map_learner: empty stream");
  const int n = static_cast<int>(stream.front().requests.size());
  const int f_dim = static_cast<int>(stream.front().feature_rows.front().size());
  for (const auto& r : stream) {
    if (static_cast<int>(r.requests.size()) != n ||
        static_cast<int>(r.feature_rows.size()) != n)
      throw std::invalid_argument("shared_map_learner: ragged stream");
    for (const Vec& f : r.feature_rows) {
      if (static_cast<int>(f.size()) != f_dim)
        throw std::invalid_argument("shared_map_learner: feature dimension mismatch");
      learners::SimplexPoint(f).validate();
    }
  }
  const int T = static_cast<int>(stream.size());
  const int window = window_of(migration_factor, gamma, n);
  const double wd = static_cast<double>(window);
  const double step =
      options.step_override > 0.0
          ? options.step_override
          : std::sqrt(std::log(static_cast<double>(k)) / (2.0 * wd * wd * T));

  SharedMapResult out;
  out.final_map = Mat(k, f_dim, 1.0 / k);
  Mat sum(k, f_dim, 0.0);

  for (const auto& round : stream) {
    const migration::PredictionStack p =
        stack_from_shared(out.final_map, round.feature_rows);
    out.ledger.record(migration::window_loss(p, round.requests, window),
                      digest_vector(out.final_map.a));
    for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += out.final_map.a[i];

    const auto grad = migration::window_loss_subgradient(p, round.requests, window);
    for (int c = 0; c < f_dim; ++c) {
      Vec g(k, 0.0);
      bool nonzero = false;
      for (int j = 0; j < n; ++j) {
        if (l1_norm(grad[j]) == 0.0) continue;
        const double fc = round.feature_rows[j][c];
        if (fc == 0.0) continue;
        nonzero = true;
        for (int r = 0; r < k; ++r) g[r] += fc * grad[j][r];
      }
      if (!nonzero) continue;
      Vec column(k);
      for (int r = 0; r < k; ++r) column[r] = out.final_map(r, c);
      const learners::SimplexPoint next =
          learners::eg_step(learners::SimplexPoint(std::move(column)), g, step);
      for (int r = 0; r < k; ++r) out.final_map(r, c) = next.weights[r];
    }
  }

  for (double& v : sum.a) v /= static_cast<double>(T);
  Mat best(k, f_dim, 1.0 / k);
  double best_loss = shared_stream_loss(best, stream, window);
  for (const Mat* cand : {&out.final_map, &sum}) {
    const double l = shared_stream_loss(*cand, stream, window);
    if (l < best_loss) {
      best_loss = l;
      best = *cand;
    }
  }
  Mat refine = best;
  for (int pass = 1; pass <= options.offline_comparator_passes; ++pass) {
    Mat g_total(k, f_dim, 0.0);
    for (const auto& round : stream) {
      const migration::PredictionStack p = stack_from_shared(refine, round.feature_rows);
      const auto grad = migration::window_loss_subgradient(p, round.requests, window);
      for (int j = 0; j < n; ++j) {
        if (l1_norm(grad[j]) == 0.0) continue;
        for (int c = 0; c < f_dim; ++c) {
          const double fc = round.feature_rows[j][c];
          if (fc == 0.0) continue;
          for (int r = 0; r < k; ++r) g_total(r, c) += fc * grad[j][r];
        }
      }
    }
    const double pass_step = 0.5 / (T * std::sqrt(static_cast<double>(pass)));
    for (int c = 0; c < f_dim; ++c) {
      Vec column(k), g(k);
      for (int r = 0; r < k; ++r) {
        column[r] = refine(r, c);
        g[r] = g_total(r, c);
      }
      learners::SimplexPoint next =
          learners::eg_step(learners::SimplexPoint(std::move(column)), g, pass_step);
      for (int r = 0; r < k; ++r)
        refine(r, c) = 0.999 * next.weights[r] + 0.001 / k;
    }
    const double l = shared_stream_loss(refine, stream, window);
    if (l < best_loss) {
      best_loss = l;
      best = refine;
    }
  }

  (void)best_loss;
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& r : stream)
    comp_rounds.push_back(migration::window_loss(stack_from_shared(best, r.feature_rows),
                                                 r.requests, window));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value =
      wd * f_dim * std::sqrt(2.0 * T * std::log(static_cast<double>(k)));
  return out;
}

StackedMapResult stacked_map_learner(const std::vector<StackedRound>& stream, int k,
                                     double migration_factor, double gamma,
                                     const MapLearnerOptions& options) {
  if (stream.empty()) throw std::invalid_argument("stacked_map_learner: empty stream");
  const int n = static_cast<int>(stream.front().requests.size());
  const int f_dim = static_cast<int>(stream.front().features.size());
  for (const auto& r : stream) {
    if (static_cast<int>(r.requests.size()) != n ||
        static_cast<int>(r.features.size()) != f_dim)
      throw std::invalid_argument("stacked_map_learner: ragged stream");
    learners::SimplexPoint(r.features).validate();
  }
  const int T = static_cast<int>(stream.size());
  const int window = window_of(migration_factor, gamma, n);
  const double wd = static_cast<double>(window);
  const double step =
      options.step_override > 0.0
          ? options.step_override
          : std::sqrt(std::log(static_cast<double>(k)) / (2.0 * wd * wd * T));

  StackedMapResult out;
  out.final_stack = StochasticStack::uniform(n, k, f_dim);

  auto stack_predictions = [&](const StochasticStack& s, const Vec& f) {
    migration::PredictionStack p;
    p.rows.reserve(n);
    for (const Mat& m : s.maps) p.rows.emplace_back(m.multiply(f));
    return p;
  };
  auto total_loss = [&](const StochasticStack& s) {
    double total = 0.0;
    for (const auto& r : stream)
      total += migration::window_loss(stack_predictions(s, r.features), r.requests,
                                      window);
    return total;
  };

  for (const auto& round : stream) {
    const migration::PredictionStack p =
        stack_predictions(out.final_stack, round.features);
    Vec flat;
    for (const Mat& m : out.final_stack.maps)
      flat.insert(flat.end(), m.a.begin(), m.a.end());
    out.ledger.record(migration::window_loss(p, round.requests, window),
                      digest_vector(flat));

    const auto grad = migration::window_loss_subgradient(p, round.requests, window);
    for (int j = 0; j < n; ++j) {
      if (l1_norm(grad[j]) == 0.0) continue;
      Mat& m = out.final_stack.maps[j];
      for (int c = 0; c < f_dim; ++c) {
        const double fc = round.features[c];
        if (fc == 0.0) continue;
        Vec column(k), g(k);
        for (int r = 0; r < k; ++r) {
          column[r] = m(r, c);
          g[r] = fc * grad[j][r];
        }
        const learners::SimplexPoint next =
            learners::eg_step(learners::SimplexPoint(std::move(column)), g, step);
        for (int r = 0; r < k; ++r) m(r, c) = next.weights[r];
      }
    }
  }

  StochasticStack best = StochasticStack::uniform(n, k, f_dim);
  double best_loss = total_loss(best);
  const double final_loss = total_loss(out.final_stack);
  if (final_loss < best_loss) {
    best_loss = final_loss;
    best = out.final_stack;
  }
  StochasticStack refine = best;
  for (int pass = 1; pass <= options.offline_comparator_passes; ++pass) {
    std::vector<Mat> g_total(n, Mat(k, f_dim, 0.0));
    for (const auto& round : stream) {
      const migration::PredictionStack p = stack_predictions(refine, round.features);
      const auto grad = migration::window_loss_subgradient(p, round.requests, window);
      for (int j = 0; j < n; ++j) {
        if (l1_norm(grad[j]) == 0.0) continue;
        for (int c = 0; c < f_dim; ++c)
          for (int r = 0; r < k; ++r)
            g_total[j](r, c) += round.features[c] * grad[j][r];
      }
    }
    const double pass_step = 0.5 / (T * std::sqrt(static_cast<double>(pass)));
    for (int j = 0; j < n; ++j) {
      for (int c = 0; c < f_dim; ++c) {
        Vec column(k), g(k);
        for (int r = 0; r < k; ++r) {
          column[r] = refine.maps[j](r, c);
          g[r] = g_total[j](r, c);
        }
        learners::SimplexPoint next =
            learners::eg_step(learners::SimplexPoint(std::move(column)), g, pass_step);
        for (int r = 0; r < k; ++r)
          refine.maps[j](r, c) = 0.999 * next.weights[r] + 0.001 / k;
      }
    }
    const double l = total_loss(refine);
    if (l < best_loss) {
      best_loss = l;
      best = refine;
    }
  }

  (void)best_loss;
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& r : stream)
    comp_rounds.push_back(migration::window_loss(stack_predictions(best, r.features),
                                                 r.requests, window));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value =
      wd * double(n) * f_dim * std::sqrt(2.0 * T * std::log(static_cast<double>(k)));
  return out;
}


FeatureOgdResult feature_ktoco_learner(const std::vector<DualFeedbackRound>& stream,
                                       int nodes, int f_dim, double demand_cap,
                                       const Mat& comparator) {
  if (stream.empty()) throw std::invalid_argument("feature_ktoco_learner: empty stream");
  if (!(demand_cap > 0.0))
    throw std::invalid_argument("feature_ktoco_learner: cap must be positive");
  if (comparator.rows != nodes || comparator.cols != f_dim)
    throw std::invalid_argument("feature_ktoco_learner: comparator shape mismatch");
  const int T = static_cast<int>(stream.size());
  const int dim = nodes * f_dim;
  const double scale = demand_cap * std::sqrt(static_cast<double>(nodes));

  // Coin betting on the losses U_t / scale, which are 1-Lipschitz; the
  // played matrices are the betting points themselves and the guarantee
  // rescales back to the original losses.
  FeatureOgdResult out;
  learners::CoinBettingState state(dim);
  Mat current(nodes, f_dim);
  Vec sum(std::size_t(dim), 0.0);
  for (const auto& round : stream) {
    const double loss =
        weighted_l1(current.multiply(round.features), round.target_dual, round.demand);
    out.ledger.record(loss, digest_vector(current.a));
    for (int i = 0; i < dim; ++i) sum[i] += current.a[i];
    Vec g = dual_matrix_subgradient(current, round);
    for (double& v : g) v /= scale;
    auto [next_state, next_point] = learners::ktoco_step(std::move(state), g);
    state = std::move(next_state);
    current = from_flat(nodes, f_dim, std::move(next_point));
  }
  out.final_matrix = current;
  for (double& v : sum) v /= static_cast<double>(T);
  out.average_matrix = from_flat(nodes, f_dim, std::move(sum));

  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& round : stream)
    comp_rounds.push_back(
        weighted_l1(comparator.multiply(round.features), round.target_dual,
                    round.demand));
  out.ledger.set_comparator(std::move(comp_rounds));
  const double norm = comparator.frobenius_norm();
  out.ledger.bound_value =
      scale *
      (norm * std::sqrt(T * std::log(1.0 + 24.0 * double(T) * T * norm * norm)) +
       1.0);
  return out;
}

std::vector<FeatureVector> read_feature_vectors(std::istream& in) {
  std::vector<FeatureVector> out;
  std::string line;
  int line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    Vec f;
    double v;
    while (row >> v) f.push_back(v);
    if (dim == 0) dim = f.size();
    if (f.size() != dim)
      throw std::runtime_error("feature read: line " + std::to_string(line_no) +
                               ": dimension mismatch");
    FeatureVector point{std::move(f)};
    if (!point.is_valid(1e-9))
      throw std::runtime_error("feature read: line " + std::to_string(line_no) +
                               ": not a simplex vector");
    out.push_back(std::move(point));
  }
  return out;
}

void write_feature_vectors(std::ostream& out,
                           const std::vector<FeatureVector>& features) {
  out.precision(17);
  for (const auto& f : features) {
    for (int i = 0; i < f.dim(); ++i)
      out << f.weights[i] << (i + 1 == f.dim() ? '\n' : ' ');
  }
}

}  // namespace predlearn::features
