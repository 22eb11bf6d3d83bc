#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "predlearn/learners.hpp"
#include "predlearn/stream.hpp"

namespace predlearn::harness {

/// Flat experiment configuration: reserved keys plus free-form per-problem
/// parameters. Unset parameters take documented defaults.
struct ExperimentConfig {
  std::string problem;  // matching bmatching migration scheduling rr
                        // ski-discrete ski-continuous perm
  int rounds = 100;     // T
  std::uint64_t seed = 1;
  int trials = 1;
  std::string stream = "iid";
  std::string out_path = "experiment.csv";
  std::map<std::string, std::string> params;

  static ExperimentConfig from_file(const std::string& path);
  /// key=value override, reserved keys included.
  void apply_override(const std::string& assignment);

  double param(const std::string& key, double fallback) const;
  std::string param_str(const std::string& key, const std::string& fallback) const;
  void validate() const;
};

/// Fully resolved numeric/string parameters a problem's bound depends on;
/// these are echoed into the CSV header so summarize can recompute the bound
/// on its own.
std::map<std::string, std::string> resolved_params(const ExperimentConfig& config);

struct TrialOutcome {
  int trial = 0;
  learners::RegretLedger ledger;
  double final_regret = 0.0;
  bool pass = true;
  std::string note;
};

struct ExperimentOutcome {
  ExperimentConfig config;
  std::vector<TrialOutcome> trials;
  bool all_pass = true;
};

/// Run every trial (in parallel worker threads, one derived RNG stream per
/// trial), write the CSV, and report per-trial bound checks.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

void print_outcome(std::ostream& out, const ExperimentOutcome& outcome);

struct TrialSummary {
  int trial = 0;
  double final_regret = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct SummaryReport {
  std::string problem;
  int rounds = 0;
  std::vector<TrialSummary> trials;
  double mean_regret = 0.0;
  double max_regret = 0.0;
  double pass_rate = 1.0;
  bool bounds_match = true;  // CSV bound column vs the recomputed value
  bool all_pass = true;
};

/// Parse a result CSV, recompute the closed-form bound from the header
/// parameters, and aggregate per-trial regrets. Malformed rows raise with
/// the offending line number.
SummaryReport summarize(const std::string& csv_path);

void print_summary(std::ostream& out, const SummaryReport& report);

/// Canonical double formatting used everywhere a CSV is written.
std::string format_double(double value);

}  // namespace predlearn::harness
