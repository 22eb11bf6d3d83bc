#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "predlearn/learners.hpp"
#include "predlearn/linalg.hpp"

namespace predlearn::matching {

/// Bipartite instance with nonnegative integer edge costs. Node ids are
/// 0-based per side; dual vectors index left nodes first, then right nodes.
struct BipartiteInstance {
  struct Edge {
    int u = 0;  // left node
    int v = 0;  // right node
    long long cost = 0;
  };

  int n_left = 0;
  int n_right = 0;
  std::vector<Edge> edges;

  int total_nodes() const { return n_left + n_right; }
  void validate() const;
};

/// Per-node demands; a perfect b-matching saturates every node exactly.
struct DemandVector {
  std::vector<long long> b;  // size total_nodes, left block then right block

  long long max_demand() const;
  void validate(const BipartiteInstance& g) const;
};

struct SolveReport {
  std::vector<std::pair<int, int>> matching;  // (u, v); repeated for multiplicity
  long long objective = 0;
  Vec optimal_duals;       // feasible, tight on matched edges
  long long iterations = 0;  // augmenting phases + dual adjustment rounds
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Coordinatewise nearest integer; halves round away from zero.
std::vector<long long> round_to_integer(std::span<const double> y);

/// Restore dual feasibility: walk the edges in order and decrease the left
/// endpoint by the current violation. Right duals never move.
std::vector<long long> repair_duals(const BipartiteInstance& g,
                                    std::vector<long long> duals);

/// Min-weight perfect matching from zero initial duals.
SolveReport hungarian_solve(const BipartiteInstance& g);

/// Min-weight perfect matching warm-started from a predicted real dual
/// vector: round, repair, then run the primal-dual solver.
SolveReport warmstart_solve(const BipartiteInstance& g,
                            std::span<const double> predicted);

/// Min-weight perfect b-matching by node splitting; every copy of a node
/// shares its dual prediction, and reported duals take the per-node maximum
/// over copies (feasible and optimal by weak duality).
SolveReport b_matching_solve(const BipartiteInstance& g, const DemandVector& demand,
                             std::span<const double> predicted);

enum class ErrorNorm { l1, weighted_l1, linf };

/// Selected norm of x - target; weighted_l1 weighs coordinates by demand.
double dual_error(std::span<const double> x, std::span<const double> target,
                  const DemandVector* demand, ErrorNorm norm);

/// Exhaustive minimum over perfect matchings (permutation enumeration;
/// requires equal sides with at most 9 nodes each).
long long brute_force_matching_objective(const BipartiteInstance& g);

/// Exact minimum over perfect b-matchings via dynamic programming on
/// residual right-side capacities. Independent of the primal-dual solver.
long long brute_force_b_matching_objective(const BipartiteInstance& g,
                                           const DemandVector& demand);

struct DualLearnerRound {
  Vec target;                     // optimal duals revealed after the instance
  std::vector<long long> demand;  // per-node loss weights; empty means unit
};

struct DualLearnerResult {
  learners::RegretLedger ledger;
  Vec final_point;
  Vec average_point;
};

/// Projected OGD on the (demand-weighted) l1 distance to the revealed duals
/// over the box [-cost_cap, cost_cap]^n. The comparator is the exact
/// coordinatewise weighted median.
DualLearnerResult dual_ogd_learner(const std::vector<DualLearnerRound>& stream,
                                   int nodes, double cost_cap, double demand_cap);

struct LinfLearnerOptions {
  int offline_comparator_passes = 300;
};

struct LinfLearnerResult {
  learners::RegretLedger ledger;
  Vec final_point;
  Vec average_point;
};

/// Projected OGD on ||x - target||_inf over [-bound_m, bound_m]^d. The
/// comparator is the best of several candidates refined by offline
/// subgradient passes.
LinfLearnerResult linf_ogd_learner(const std::vector<Vec>& targets, double bound_m,
                                   const LinfLearnerOptions& options = {});

// Text format: header "n_left n_right m", then one "u v c" line per edge.
BipartiteInstance read_instance(std::istream& in);
void write_instance(std::ostream& out, const BipartiteInstance& g);
// Demand file: one integer per node, left block then right block.
DemandVector read_demands(std::istream& in, const BipartiteInstance& g);
void write_demands(std::ostream& out, const DemandVector& d);

}  // namespace predlearn::matching
