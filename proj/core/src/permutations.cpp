#include "predlearn/permutations.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace predlearn::permutations {

PermutationMatrix::PermutationMatrix(std::vector<int> mapping) : to_(std::move(mapping)) {
  const int n = size();
  std::vector<char> seen(n, 0);
  for (int c : to_) {
    if (c < 0 || c >= n || seen[c])
      throw std::invalid_argument("permutation: mapping is not a bijection");
    seen[c] = 1;
  }
}

PermutationMatrix PermutationMatrix::identity(int n) {
  std::vector<int> m(n);
  std::iota(m.begin(), m.end(), 0);
  return PermutationMatrix(std::move(m));
}

std::vector<std::vector<double>> PermutationMatrix::dense() const {
  std::vector<std::vector<double>> x(size(), std::vector<double>(size(), 0.0));
  for (int i = 0; i < size(); ++i) x[i][to_[i]] = 1.0;
  return x;
}

void JobBatch::validate() const {
  if (weights.empty() || weights.size() != processing.size())
    throw std::invalid_argument("job batch: vector size mismatch");
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("job batch: negative weight");
  for (double p : processing)
    if (!(p >= 0.0)) throw std::invalid_argument("job batch: negative processing time");
}

double perm_error(const PermutationMatrix& x, const JobBatch& batch,
                  bool include_diagonal) {
  batch.validate();
  const int n = x.size();
  if (batch.jobs() != n) throw std::invalid_argument("perm_error: size mismatch");

  const auto xd = x.dense();
  std::vector<std::vector<double>> masked(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool upper = include_diagonal ? j >= i : j > i;
      if (upper) masked[i][j] = xd[i][j];
    }

  // trace(masked^T * X * w p^T)
  std::vector<std::vector<double>> left(n, std::vector<double>(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += masked[i][a] * xd[i][b];
      left[a][b] = s;
    }
  double trace = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      trace += left[a][b] * batch.weights[b] * batch.processing[a];
  return trace;
}

namespace {

std::vector<PermutationMatrix> enumerate_permutations(int n) {
  if (n < 1 || n > 8)
    throw std::invalid_argument("permutations: n must lie in [1,8]");
  std::vector<int> m(n);
  std::iota(m.begin(), m.end(), 0);
  std::vector<PermutationMatrix> all;
  do {
    all.emplace_back(m);
  } while (std::next_permutation(m.begin(), m.end()));
  return all;
}

/// Closed form of the trace: jobs kept by the mask contribute w * p once.
double fast_error(const std::vector<int>& mapping, const JobBatch& batch,
                  bool include_diagonal) {
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(mapping.size()); ++i) {
    const int j = mapping[i];
    const bool upper = include_diagonal ? j >= i : j > i;
    if (upper) s += batch.weights[j] * batch.processing[j];
  }
  return s;
}

}  // namespace

PermLearnerResult perm_eg_learner(const std::vector<JobBatch>& stream, int n,
                                  double weight_cap, double processing_cap, Rng& rng,
                                  const PermLearnerOptions& options) {
  if (stream.empty()) throw std::invalid_argument("perm_eg_learner: empty stream");
  if (!(weight_cap > 0.0) || !(processing_cap > 0.0))
    throw std::invalid_argument("perm_eg_learner: caps must be positive");
  for (const auto& batch : stream) {
    batch.validate();
    if (batch.jobs() != n)
      throw std::invalid_argument("perm_eg_learner: batch size mismatch");
    for (double w : batch.weights)
      if (w > weight_cap + 1e-9)
        throw std::invalid_argument("perm_eg_learner: weight exceeds cap");
    for (double p : batch.processing)
      if (p > processing_cap + 1e-9)
        throw std::invalid_argument("perm_eg_learner: processing exceeds cap");
  }

  PermLearnerResult out;
  out.experts = enumerate_permutations(n);
  const std::size_t experts = out.experts.size();
  const int T = static_cast<int>(stream.size());
  const double loss_cap = weight_cap * processing_cap * n;
  const double step =
      options.step_override > 0.0
          ? options.step_override
          : std::sqrt(std::log(static_cast<double>(experts)) / (2.0 * T)) / loss_cap;

  out.expert_distribution =
      learners::SimplexPoint(Vec(experts, 1.0 / double(experts)));
  Vec totals(experts, 0.0);
  Vec losses(experts);

  for (const auto& batch : stream) {
    for (std::size_t e = 0; e < experts; ++e) {
      losses[e] = fast_error(out.experts[e].mapping(), batch,
                             options.include_diagonal);
      totals[e] += losses[e];
    }
    const double expected = dot(out.expert_distribution.weights, losses);
    const std::size_t pick = rng.categorical(out.expert_distribution.weights);
    const auto& mapping = out.experts[pick].mapping();
    out.ledger.record(expected,
                      fnv1a64(mapping.data(), mapping.size() * sizeof(int)));
    if (step > 0.0)  // a single expert needs no update
      out.expert_distribution = learners::eg_step(out.expert_distribution, losses, step);
  }

  const std::size_t best =
      std::min_element(totals.begin(), totals.end()) - totals.begin();
  Vec comp_rounds;
  comp_rounds.reserve(T);
  for (const auto& batch : stream)
    comp_rounds.push_back(
        fast_error(out.experts[best].mapping(), batch, options.include_diagonal));
  out.ledger.set_comparator(std::move(comp_rounds));
  out.ledger.bound_value =
      loss_cap * std::sqrt(2.0 * n * T * std::log(static_cast<double>(n)));
  return out;
}

std::pair<PermutationMatrix, double> brute_force_best_perm(
    const std::vector<JobBatch>& batches, int n, bool include_diagonal) {
  if (batches.empty())
    throw std::invalid_argument("brute_force_best_perm: no batches");
  const std::vector<PermutationMatrix> all = enumerate_permutations(n);
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t e = 0; e < all.size(); ++e) {
    double total = 0.0;
    for (const auto& batch : batches)
      total += perm_error(all[e], batch, include_diagonal);
    if (total < best) {
      best = total;
      arg = e;
    }
  }
  return {all[arg], best};
}

std::vector<JobBatch> read_batches(std::istream& in) {
  std::vector<JobBatch> batches;
  int n = 0;
  while (in >> n) {
    if (n <= 0) throw std::runtime_error("batch read: bad job count");
    JobBatch b;
    b.weights.resize(n);
    b.processing.resize(n);
    for (double& v : b.weights)
      if (!(in >> v)) throw std::runtime_error("batch read: malformed weights");
    for (double& v : b.processing)
      if (!(in >> v)) throw std::runtime_error("batch read: malformed processing times");
    b.validate();
    batches.push_back(std::move(b));
  }
  return batches;
}

void write_batches(std::ostream& out, const std::vector<JobBatch>& batches) {
  out.precision(17);
  for (const auto& b : batches) {
    out << b.jobs() << '\n';
    for (int j = 0; j < b.jobs(); ++j)
      out << b.weights[j] << (j + 1 == b.jobs() ? '\n' : ' ');
    for (int j = 0; j < b.jobs(); ++j)
      out << b.processing[j] << (j + 1 == b.jobs() ? '\n' : ' ');
  }
}

}  // namespace predlearn::permutations
