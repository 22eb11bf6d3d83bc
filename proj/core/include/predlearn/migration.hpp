#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "predlearn/learners.hpp"
#include "predlearn/linalg.hpp"
#include "predlearn/rng.hpp"

namespace predlearn::migration {

/// Finite metric space; construction validates symmetry, zero diagonal and
/// every triangle inequality.
struct MetricSpace {
  explicit MetricSpace(std::vector<std::vector<double>> distances);

  int points() const { return static_cast<int>(dist_.size()); }
  double d(int a, int b) const { return dist_[a][b]; }
  const std::vector<std::vector<double>>& matrix() const { return dist_; }

 private:
  std::vector<std::vector<double>> dist_;
};

/// One migration episode: requests, migration cost factor D > 1, and the
/// window gamma * D (a positive integer at most the sequence length).
struct MigrationProblem {
  std::vector<int> requests;
  double migration_factor = 2.0;  // D
  double gamma = 0.5;

  int length() const { return static_cast<int>(requests.size()); }
  int window() const;
  void validate(const MetricSpace& metric) const;
};

/// Per-timestep prediction distributions over the metric points.
struct PredictionStack {
  std::vector<learners::SimplexPoint> rows;

  int length() const { return static_cast<int>(rows.size()); }
  void validate(int k) const;
  static PredictionStack uniform(int n, int k);

  Vec flattened() const;  // row-major concatenation, for digests
};

struct Trajectory {
  std::vector<int> states;
  double total_cost = 0.0;
};

/// Cost of serving `requests` with the given state sequence. No migration
/// charge before the first state (a_0 = a_1).
double trajectory_cost(const MetricSpace& metric, std::span<const int> requests,
                       std::span<const int> states, double migration_factor);

/// Offline optimum by dynamic programming over states, O(n |K|^2).
Trajectory offline_opt(const MetricSpace& metric, const MigrationProblem& problem);

/// Plan the offline-optimal trajectory for the predicted sequence, then
/// execute it verbatim against the true requests.
double lazy_predicted_run(const MetricSpace& metric, const MigrationProblem& problem,
                          std::span<const int> predicted);

/// Max over length-window windows of the mismatch count, divided by window.
double mistake_fraction(std::span<const int> predicted,
                        std::span<const int> true_requests, int window);

/// Max over windows of the summed probability of missing the true request.
double window_loss(const PredictionStack& stack, std::span<const int> true_requests,
                   int window);

/// Subgradient of window_loss: negative one-hots on the first maximizing
/// window, zero elsewhere. One vector per timestep.
std::vector<Vec> window_loss_subgradient(const PredictionStack& stack,
                                         std::span<const int> true_requests,
                                         int window);

/// w >= 0 with w * exp(w) = v, relative error 1e-12.
double lambert_w(double v);

struct MistakeBound {
  double f_value = 0.0;       // exact concave bound
  double linear_value = 0.0;  // its linear relaxation
};

/// Bound on the expected worst-window mistake count as a function of the
/// window loss u; f uses the Lambert W form and is 0 at u = 0, and is never
/// above the linear relaxation (e*u + (2/e)*log(n-window+1)) / window.
MistakeBound mistake_bound(double u, int n, int window);

/// Independent categorical draw per timestep.
std::vector<int> sample_predictions(const PredictionStack& stack, Rng& rng);

struct SequenceLearnerOptions {
  double step_override = 0.0;  // 0 means the tuned default
  int offline_comparator_passes = 400;
};

struct SequenceLearnerResult {
  learners::RegretLedger ledger;
  PredictionStack final_stack;
};

/// One exponentiated-gradient learner per timestep, fed window-loss
/// subgradients over the stream of request sequences.
SequenceLearnerResult eg_sequence_learner(
    const std::vector<std::vector<int>>& request_stream, const MetricSpace& metric,
    double migration_factor, double gamma,
    const SequenceLearnerOptions& options = {});

// Metric file: point count then the full distance matrix.
MetricSpace read_metric(std::istream& in);
void write_metric(std::ostream& out, const MetricSpace& metric);
// Request file: one index per line; a blank line separates sequences.
std::vector<std::vector<int>> read_request_sequences(std::istream& in);
void write_request_sequences(std::ostream& out,
                             const std::vector<std::vector<int>>& sequences);

}  // namespace predlearn::migration
