#pragma once

#include <string>
#include <vector>

#include "predlearn/features.hpp"
#include "predlearn/matching.hpp"
#include "predlearn/migration.hpp"
#include "predlearn/permutations.hpp"
#include "predlearn/rng.hpp"
#include "predlearn/scheduling.hpp"
#include "predlearn/skirental.hpp"

namespace predlearn::harness {

/// Stream kinds: iid draws, a ground-truth switch halfway, an alternating
/// worst-case pair, or instances loaded from files.
enum class StreamKind { iid, drifting, adversarial, file };

StreamKind parse_stream_kind(const std::string& name);
std::string stream_kind_name(StreamKind kind);

struct MatchingRound {
  matching::BipartiteInstance instance;
  matching::DemandVector demand;  // all ones for plain matching
  Vec features;                   // simplex, dimension f_dim
};

struct MatchingStreamParams {
  int nodes_per_side = 5;
  long long cost_cap = 5;    // C
  long long demand_cap = 1;  // B; 1 means plain matching
  int f_dim = 1;
};

/// Complete bipartite instances with integer costs in [0, C]. Drifting mode
/// switches the base cost pattern at T/2; adversarial mode alternates two
/// fixed patterns.
std::vector<MatchingRound> matching_stream(StreamKind kind, int rounds,
                                           const MatchingStreamParams& params,
                                           Rng& rng);

struct MigrationStream {
  migration::MetricSpace metric;
  std::vector<std::vector<int>> request_sequences;
};

struct MigrationStreamParams {
  int sequence_length = 20;  // n
  int points = 8;            // |K|
  double migration_factor = 8.0;
  double gamma = 0.5;
  double stickiness = 0.8;  // probability a slot follows the base pattern
};

/// Random Euclidean metric plus request sequences that noisily follow a base
/// pattern; the pattern switches (drifting) or alternates (adversarial).
MigrationStream migration_stream(StreamKind kind, int rounds,
                                 const MigrationStreamParams& params, Rng& rng);

struct SchedulingStream {
  std::vector<scheduling::WeightFeatureRound> rounds;
  Mat planted_map;  // the designated comparator
};

struct SchedulingStreamParams {
  int machines = 4;
  int f_dim = 3;
  double log_weight_cap = 2.0;    // B
  double comparator_norm = 2.0;   // Frobenius norm of the planted map
  double noise = 0.25;
};

SchedulingStream scheduling_stream(StreamKind kind, int rounds,
                                   const SchedulingStreamParams& params, Rng& rng);

struct RrStreamParams {
  double error_cap = 1.0;  // B, cap on eta/n
  int min_jobs = 5;
  int max_jobs = 50;
};

std::vector<scheduling::LambdaRound> rr_stream(StreamKind kind, int rounds,
                                               const RrStreamParams& params, Rng& rng);

/// Random non-clairvoyant batch with sizes in (0, size_cap] and predictions
/// perturbed by at most error_scale per job.
scheduling::RoundRobinInstance random_rr_instance(int jobs, double size_cap,
                                                  double error_scale, Rng& rng);

struct SkiStreamParams {
  double days_max = 20.0;   // N
  double price_max = 10.0;  // B
  bool discrete = true;
};

std::vector<skirental::SkiSeason> ski_stream(StreamKind kind, int rounds,
                                             const SkiStreamParams& params, Rng& rng);

struct PermStreamParams {
  int jobs = 5;
  double weight_cap = 1.0;
  double processing_cap = 1.0;
};

std::vector<permutations::JobBatch> perm_stream(StreamKind kind, int rounds,
                                                const PermStreamParams& params,
                                                Rng& rng);

/// Restricted-assignment instance whose proportional split under the planted
/// weights is exactly balanced, so the planted weights attain the offline
/// optimum and log(weights) is the learnable target.
scheduling::AssignmentInstance planted_assignment_instance(int machines, int f_dim,
                                                           double log_weight_cap,
                                                           Rng& rng);

/// Uniform random point in the probability simplex (normalized exponentials).
Vec random_simplex_point(int dim, Rng& rng);

}  // namespace predlearn::harness
