#pragma once

#include <span>
#include <vector>

#include "predlearn/learners.hpp"
#include "predlearn/linalg.hpp"
#include "predlearn/migration.hpp"

namespace predlearn::features {

using FeatureVector = learners::SimplexPoint;

/// Stack of column-stochastic maps, one per timestep of a request sequence.
struct StochasticStack {
  std::vector<Mat> maps;  // each k x f, every column a probability vector

  int length() const { return static_cast<int>(maps.size()); }
  void validate() const;
  static StochasticStack uniform(int n, int k, int f_dim);
};

/// A * f; with f in the simplex the output stays inside the entrywise
/// bound of A.
Vec predict_duals(const Mat& a, const FeatureVector& f);

/// Per-timestep prediction distributions (maps_j * f), each a valid simplex
/// point because columns are stochastic and f is a simplex point.
migration::PredictionStack predict_distributions(const StochasticStack& stack,
                                                 const FeatureVector& f);

/// Concatenation of `order` one-hot blocks over the last requests, scaled by
/// 1/order so the result is a simplex point. Missing history is padded at
/// the old end with the start symbol, encoded as the uniform block.
FeatureVector autoregressive_features(std::span<const int> history, int k,
                                      int order);

struct DualFeedbackRound {
  Vec target_dual;               // optimal duals revealed after the instance
  std::vector<long long> demand;  // per-node weights; empty means unit
  Vec features;                   // simplex, dimension f
};

struct FeatureOgdOptions {
  int offline_comparator_passes = 200;
  const Mat* comparator_hint = nullptr;
};

struct FeatureOgdResult {
  learners::RegretLedger ledger;
  Mat final_matrix;
  Mat average_matrix;
};

/// OGD over matrices with entries in [-cost_cap, cost_cap] on the losses
/// ||A f - target||_{demand,1}; with one-dimensional constant features this
/// reproduces the fixed-dual learner step for step.
FeatureOgdResult feature_ogd_learner(const std::vector<DualFeedbackRound>& stream,
                                     int nodes, int f_dim, double cost_cap,
                                     double demand_cap,
                                     const FeatureOgdOptions& options = {});

struct SharedMapRound {
  std::vector<int> requests;
  std::vector<Vec> feature_rows;  // one f-simplex per timestep
};

struct StackedRound {
  std::vector<int> requests;
  Vec features;  // one f-simplex per instance
};

struct MapLearnerOptions {
  double step_override = 0.0;
  int offline_comparator_passes = 200;
};

struct SharedMapResult {
  learners::RegretLedger ledger;
  Mat final_map;  // k x f, column-stochastic
};

struct StackedMapResult {
  learners::RegretLedger ledger;
  StochasticStack final_stack;
};

/// One shared column-stochastic map reused at every timestep; f per-column
/// exponentiated-gradient learners on window-loss subgradients.
SharedMapResult shared_map_learner(const std::vector<SharedMapRound>& stream, int k,
                                   double migration_factor, double gamma,
                                   const MapLearnerOptions& options = {});

/// Per-timestep column-stochastic maps (n * f column learners).
StackedMapResult stacked_map_learner(const std::vector<StackedRound>& stream, int k,
                                     double migration_factor, double gamma,
                                     const MapLearnerOptions& options = {});

/// Coin-betting variant of the dual-map learner for the case where the best
/// matrix is unbounded: losses are normalized by demand_cap * sqrt(nodes) to
/// keep the subgradient norm within 1, and the recorded bound is the
/// parameter-free guarantee for the designated comparator scaled back up.
FeatureOgdResult feature_ktoco_learner(const std::vector<DualFeedbackRound>& stream,
                                       int nodes, int f_dim, double demand_cap,
                                       const Mat& comparator);

// Feature file: one simplex vector per line, whitespace-separated entries;
// every line is validated on load and must share the first line's dimension.
std::vector<FeatureVector> read_feature_vectors(std::istream& in);
void write_feature_vectors(std::ostream& out,
                           const std::vector<FeatureVector>& features);

}  // namespace predlearn::features
