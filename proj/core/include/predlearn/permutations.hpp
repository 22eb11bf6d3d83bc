#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "predlearn/learners.hpp"
#include "predlearn/linalg.hpp"
#include "predlearn/rng.hpp"

namespace predlearn::permutations {

/// Permutation matrix stored by row: column(i) is the position of the 1 in
/// row i. Construction validates bijectivity.
struct PermutationMatrix {
  explicit PermutationMatrix(std::vector<int> mapping);
  static PermutationMatrix identity(int n);

  int size() const { return static_cast<int>(to_.size()); }
  int column(int row) const { return to_[row]; }
  const std::vector<int>& mapping() const { return to_; }
  std::vector<std::vector<double>> dense() const;

 private:
  std::vector<int> to_;
};

/// One batch of jobs: weights and processing times, both bounded.
struct JobBatch {
  Vec weights;
  Vec processing;

  int jobs() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

/// Trace form of the prioritization error, evaluated literally on dense
/// matrices with the upper-triangular mask. The mask includes the diagonal
/// by default; the strict variant sits behind the flag.
double perm_error(const PermutationMatrix& x, const JobBatch& batch,
                  bool include_diagonal = true);

struct PermLearnerOptions {
  double step_override = 0.0;
  bool include_diagonal = true;
};

struct PermLearnerResult {
  learners::RegretLedger ledger;
  learners::SimplexPoint expert_distribution;
  std::vector<PermutationMatrix> experts;  // lexicographic order
};

/// Randomized exponentiated gradient over all n! permutations, n at most 8.
/// Recorded losses are expectations under the expert distribution; digests
/// come from the sampled permutation.
PermLearnerResult perm_eg_learner(const std::vector<JobBatch>& stream, int n,
                                  double weight_cap, double processing_cap, Rng& rng,
                                  const PermLearnerOptions& options = {});

/// Exhaustive minimizer of the summed error over all n! permutations; ties
/// go to the lexicographically first mapping.
std::pair<PermutationMatrix, double> brute_force_best_perm(
    const std::vector<JobBatch>& batches, int n, bool include_diagonal = true);

// Batch file: "n", weights line, processing line.
std::vector<JobBatch> read_batches(std::istream& in);
void write_batches(std::ostream& out, const std::vector<JobBatch>& batches);

}  // namespace predlearn::permutations
