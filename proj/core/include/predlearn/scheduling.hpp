#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "predlearn/learners.hpp"
#include "predlearn/linalg.hpp"

namespace predlearn::scheduling {

/// Restricted-assignment instance: jobs with allowed machine sets, the
/// planted good machine weights, and an instance feature vector.
struct AssignmentInstance {
  struct Job {
    double size = 0.0;
    std::vector<int> allowed;
  };

  int machines = 0;
  std::vector<Job> jobs;
  Vec good_weights;                 // positive per machine
  learners::SimplexPoint features;  // instance features

  void validate() const;
};

/// One non-clairvoyant batch: true and predicted job sizes.
struct RoundRobinInstance {
  std::vector<double> true_sizes;
  std::vector<double> predicted_sizes;

  int jobs() const { return static_cast<int>(true_sizes.size()); }
  /// Total absolute prediction error.
  double prediction_error() const;
  void validate() const;
};

/// ||x - log w||_inf for positive weights w.
double logit_loss(std::span<const double> x, std::span<const double> weights);
Vec logit_loss_subgradient(std::span<const double> x, std::span<const double> weights);
/// min{logit_loss, log m}, the truncated competitive proxy.
double truncated_logit_loss(std::span<const double> x, std::span<const double> weights,
                            int machines);

/// Split every job across its allowed machines proportionally to the given
/// weights; returns the resulting max machine load.
double fractional_assign(const AssignmentInstance& instance,
                         std::span<const double> weights);

/// Minimum fractional makespan via binary search with a max-flow
/// feasibility check, accurate to 1e-6 relative.
double offline_fractional_opt(const AssignmentInstance& instance);

/// Exact minimum fractional makespan as the max over machine subsets S of
/// (total size of jobs confined to S) / |S|. Exhaustive over subsets, so
/// limited to small machine counts; independent of the flow-based solver.
double offline_fractional_opt_by_cuts(const AssignmentInstance& instance);

struct WeightFeatureRound {
  Vec weights;   // positive machine weights revealed after the instance
  Vec features;  // simplex features, dimension f
};

struct MatrixLearnerResult {
  learners::RegretLedger ledger;
  Mat final_matrix;
  Mat average_matrix;
};

/// Coin-betting learner for the matrix map features -> predicted logits.
/// The ledger compares against the designated comparator matrix and carries
/// its parameter-free bound.
MatrixLearnerResult ktoco_logit_learner(const std::vector<WeightFeatureRound>& stream,
                                        int machines, int f_dim,
                                        const Mat& comparator);

struct OgdMatrixOptions {
  int offline_comparator_passes = 300;
  const Mat* comparator_hint = nullptr;  // extra candidate, e.g. the planted map
};

/// Projected OGD over the entrywise box ||A||_max <= bound_b on the same
/// logit losses; bound_b = 0 pins the matrix at zero.
MatrixLearnerResult ogd_bounded_matrix_learner(
    const std::vector<WeightFeatureRound>& stream, int machines, int f_dim,
    double bound_b, const OgdMatrixOptions& options = {});

/// min{(1 + 2 eta/n) / (1 - lambda), 2 / lambda} for lambda in (0,1).
double rr_bound(double lambda, double eta, double n);

/// Event-driven simulation of the preferential round-robin mixture: a
/// lambda fraction of the processor is shared equally among alive jobs and
/// the rest goes to the alive job with the smallest predicted size (ties by
/// index). Returns total completion time divided by the true-SPT optimum.
double rr_simulate(const RoundRobinInstance& instance, double lambda);

struct LambdaRound {
  double eta = 0.0;
  double n = 1.0;
};

struct ForecasterOptions {
  int grid_points = 512;
  int reference_grid_points = 4096;
  double step_override = 0.0;
};

struct ForecasterResult {
  learners::RegretLedger ledger;
  learners::GridDensity final_density;
};

/// Exponentially weighted forecaster for the trade-off parameter on the
/// round-robin bound; losses are rr_bound(lambda, eta_t, n_t). The recorded
/// loss each round is the expectation under the current density; the digest
/// comes from the sampled lambda.
ForecasterResult lambda_forecaster(const std::vector<LambdaRound>& stream, double cap_b,
                                   Rng& rng, const ForecasterOptions& options = {});

// Instance text: "m f_dim", weight line, feature line, then one
// "size k allowed..." line per job (k = allowed-set size).
AssignmentInstance read_assignment_instance(std::istream& in);
void write_assignment_instance(std::ostream& out, const AssignmentInstance& inst);
// Round-robin text: "n", true sizes line, predicted sizes line.
RoundRobinInstance read_rr_instance(std::istream& in);
void write_rr_instance(std::ostream& out, const RoundRobinInstance& inst);

}  // namespace predlearn::scheduling
