#include "predlearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace predlearn::harness {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

const std::vector<std::string> kProblems = {
    "matching", "bmatching",    "migration",     "scheduling",
    "rr",       "ski-discrete", "ski-continuous", "perm"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               " is not key=value");
    cfg.apply_override(t);
  }
  return cfg;
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must be key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key == "problem")
    problem = value;
  else if (key == "T")
    rounds = std::stoi(value);
  else if (key == "seed")
    seed = std::stoull(value);
  else if (key == "trials")
    trials = std::stoi(value);
  else if (key == "stream")
    stream = value;
  else if (key == "out")
    out_path = value;
  else
    params[key] = value;
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  return std::stod(it->second);
}

std::string ExperimentConfig::param_str(const std::string& key,
                                        const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void ExperimentConfig::validate() const {
  if (std::find(kProblems.begin(), kProblems.end(), problem) == kProblems.end())
    throw std::invalid_argument("config: unknown problem '" + problem + "'");
  if (rounds < 0) throw std::invalid_argument("config: T must be nonnegative");
  if (trials < 1) throw std::invalid_argument("config: trials must be positive");
  parse_stream_kind(stream);
  if (problem == "scheduling") {
    const std::string learner = param_str("learner", "ktoco");
    if (learner != "ktoco" && learner != "ogd")
      throw std::invalid_argument("config: scheduling learner must be ktoco or ogd");
  }
}

std::map<std::string, std::string> resolved_params(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  auto put = [&](const std::string& key, double fallback) {
    out[key] = format_double(cfg.param(key, fallback));
  };
  if (cfg.problem == "matching" || cfg.problem == "bmatching") {
    put("nodes_per_side", 5);
    put("C", 5);
    put("B", cfg.problem == "bmatching" ? 3 : 1);
    put("f_dim", 1);
  } else if (cfg.problem == "migration") {
    put("n", 20);
    put("K", 8);
    put("D", 8);
    put("gamma", 0.5);
  } else if (cfg.problem == "scheduling") {
    put("m", 4);
    put("f_dim", 3);
    put("B", 2);
    put("comparator_norm", 2);
    out["learner"] = cfg.param_str("learner", "ktoco");
  } else if (cfg.problem == "rr") {
    put("B", 1);
  } else if (cfg.problem == "ski-discrete") {
    put("N", 20);
    put("B", 10);
  } else if (cfg.problem == "ski-continuous") {
    put("N", 20);
    put("B", 10);
    put("beta", 0.5);
    put("c1", 1);
    put("c2", 1);
    put("x_points", 0);
    put("lambda_points", 0);
  } else if (cfg.problem == "perm") {
    put("n", 5);
    put("W", 1);
    put("P", 1);
  }
  return out;
}

namespace {

double recompute_bound(const std::string& problem, int rounds,
                       const std::map<std::string, std::string>& params) {
  auto num = [&](const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end())
      throw std::runtime_error("summary: missing parameter " + key);
    return std::stod(it->second);
  };
  const double t = static_cast<double>(rounds);
  if (rounds == 0) return 0.0;
  if (problem == "matching" || problem == "bmatching") {
    const double n = 2.0 * num("nodes_per_side");
    const double f = std::max(1.0, num("f_dim"));
    return num("C") * num("B") * n * f * std::sqrt(2.0 * t);
  }
  if (problem == "migration") {
    const double window = std::round(num("gamma") * num("D"));
    return window * num("n") * std::sqrt(2.0 * t * std::log(num("K")));
  }
  if (problem == "scheduling") {
    const auto it = params.find("learner");
    const std::string learner = it == params.end() ? "ktoco" : it->second;
    if (learner == "ogd")
      return num("B") * std::sqrt(2.0 * num("m") * num("f_dim") * t);
    const double norm = num("comparator_norm");
    return norm * std::sqrt(t * std::log(1.0 + 24.0 * t * t * norm * norm)) + 1.0;
  }
  if (problem == "rr")
    return 9.0 * num("B") * (1.0 + std::sqrt(0.5 * t * std::log(t)));
  if (problem == "ski-discrete")
    return 6.0 * num("N") * std::sqrt(t * std::log(num("B") * num("N") * t));
  if (problem == "ski-continuous") {
    const double nb = num("N") + num("B");
    return num("c1") * std::sqrt(t * std::log(num("N") * t)) +
           num("c2") * nb * nb * std::pow(t, 1.0 - num("beta"));
  }
  if (problem == "perm") {
    const double n = num("n");
    return num("W") * num("P") * n * std::sqrt(2.0 * n * t * std::log(n));
  }
  throw std::runtime_error("summary: unknown problem " + problem);
}

struct FileData {
  std::vector<MatchingRound> matching_rounds;
  std::vector<std::vector<int>> request_sequences;
  std::unique_ptr<migration::MetricSpace> metric;
  std::vector<scheduling::WeightFeatureRound> scheduling_rounds;
  std::vector<scheduling::LambdaRound> rr_rounds;
  std::vector<skirental::SkiSeason> seasons;
  std::vector<permutations::JobBatch> batches;
  int rounds = 0;
};

FileData load_file_data(const ExperimentConfig& cfg) {
  FileData data;
  const std::string path = cfg.param_str("instances", "");
  if (path.empty() && cfg.problem != "migration")
    throw std::invalid_argument("file stream needs instances=PATH");

  if (cfg.problem == "matching" || cfg.problem == "bmatching") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ifstream demand_in;
    const std::string demand_path = cfg.param_str("demands", "");
    if (cfg.problem == "bmatching") {
      if (demand_path.empty())
        throw std::invalid_argument("bmatching file stream needs demands=PATH");
      demand_in.open(demand_path);
      if (!demand_in) throw std::runtime_error("cannot open " + demand_path);
    }
    std::vector<features::FeatureVector> file_features;
    const std::string features_path = cfg.param_str("features", "");
    if (!features_path.empty()) {
      std::ifstream fin(features_path);
      if (!fin) throw std::runtime_error("cannot open " + features_path);
      file_features = features::read_feature_vectors(fin);
    }
    while (true) {
      int probe = in.peek();
      while (probe == ' ' || probe == '\n' || probe == '\t' || probe == '\r') {
        in.get();
        probe = in.peek();
      }
      if (probe == EOF) break;
      MatchingRound round;
      round.instance = matching::read_instance(in);
      if (cfg.problem == "bmatching")
        round.demand = matching::read_demands(demand_in, round.instance);
      else
        round.demand.b.assign(round.instance.total_nodes(), 1);
      const std::size_t index = data.matching_rounds.size();
      if (!file_features.empty()) {
        if (index >= file_features.size())
          throw std::runtime_error("feature file has fewer lines than instances");
        round.features = file_features[index].weights;
      } else {
        round.features = {1.0};
      }
      data.matching_rounds.push_back(std::move(round));
    }
    data.rounds = static_cast<int>(data.matching_rounds.size());
  } else if (cfg.problem == "migration") {
    const std::string metric_path = cfg.param_str("metric", "");
    const std::string requests_path = cfg.param_str("requests", path);
    if (metric_path.empty() || requests_path.empty())
      throw std::invalid_argument("migration file stream needs metric= and requests=");
    std::ifstream min(metric_path);
    if (!min) throw std::runtime_error("cannot open " + metric_path);
    data.metric = std::make_unique<migration::MetricSpace>(migration::read_metric(min));
    std::ifstream rin(requests_path);
    if (!rin) throw std::runtime_error("cannot open " + requests_path);
    data.request_sequences = migration::read_request_sequences(rin);
    data.rounds = static_cast<int>(data.request_sequences.size());
  } else if (cfg.problem == "scheduling") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    while (true) {
      int probe = in.peek();
      while (probe == ' ' || probe == '\n' || probe == '\t' || probe == '\r') {
        in.get();
        probe = in.peek();
      }
      if (probe == EOF) break;
      const auto inst = scheduling::read_assignment_instance(in);
      data.scheduling_rounds.push_back({inst.good_weights, inst.features.weights});
    }
    data.rounds = static_cast<int>(data.scheduling_rounds.size());
  } else if (cfg.problem == "rr") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    while (in.peek() != EOF) {
      int probe = in.peek();
      while (probe == ' ' || probe == '\n' || probe == '\t' || probe == '\r') {
        in.get();
        probe = in.peek();
      }
      if (probe == EOF) break;
      const auto inst = scheduling::read_rr_instance(in);
      data.rr_rounds.push_back(
          {inst.prediction_error(), static_cast<double>(inst.jobs())});
    }
    data.rounds = static_cast<int>(data.rr_rounds.size());
  } else if (cfg.problem == "ski-discrete" || cfg.problem == "ski-continuous") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    data.seasons = skirental::read_seasons(in);
    data.rounds = static_cast<int>(data.seasons.size());
  } else if (cfg.problem == "perm") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    data.batches = permutations::read_batches(in);
    data.rounds = static_cast<int>(data.batches.size());
  }
  return data;
}

learners::RegretLedger run_matching_trial(const ExperimentConfig& cfg,
                                          StreamKind kind, const FileData* file,
                                          std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  const bool weighted = cfg.problem == "bmatching";
  MatchingStreamParams params;
  params.nodes_per_side = static_cast<int>(cfg.param("nodes_per_side", 5));
  params.cost_cap = static_cast<long long>(cfg.param("C", 5));
  params.demand_cap = static_cast<long long>(cfg.param("B", weighted ? 3 : 1));
  params.f_dim = static_cast<int>(cfg.param("f_dim", 1));

  std::vector<MatchingRound> stream;
  if (kind == StreamKind::file)
    stream = file->matching_rounds;
  else
    stream = matching_stream(kind, cfg.rounds, params, rng);

  const int nodes = stream.empty() ? 2 * params.nodes_per_side
                                   : stream.front().instance.total_nodes();
  const double cost_cap = static_cast<double>(params.cost_cap);
  const double demand_cap = static_cast<double>(params.demand_cap);

  if (params.f_dim > 1) {
    std::vector<features::DualFeedbackRound> rounds;
    rounds.reserve(stream.size());
    for (const auto& r : stream) {
      features::DualFeedbackRound fr;
      const auto report =
          weighted ? matching::b_matching_solve(r.instance, r.demand,
                                                Vec(r.instance.total_nodes(), 0.0))
                   : matching::hungarian_solve(r.instance);
      fr.target_dual = report.optimal_duals;
      if (weighted) fr.demand = r.demand.b;
      fr.features = r.features;
      rounds.push_back(std::move(fr));
    }
    return features::feature_ogd_learner(rounds, nodes, params.f_dim, cost_cap,
                                         demand_cap)
        .ledger;
  }

  std::vector<matching::DualLearnerRound> rounds;
  rounds.reserve(stream.size());
  for (const auto& r : stream) {
    matching::DualLearnerRound dr;
    const auto report =
        weighted ? matching::b_matching_solve(r.instance, r.demand,
                                              Vec(r.instance.total_nodes(), 0.0))
                 : matching::hungarian_solve(r.instance);
    dr.target = report.optimal_duals;
    if (weighted) dr.demand = r.demand.b;
    rounds.push_back(std::move(dr));
  }
  return matching::dual_ogd_learner(rounds, nodes, cost_cap, demand_cap).ledger;
}

learners::RegretLedger run_migration_trial(const ExperimentConfig& cfg,
                                           StreamKind kind, const FileData* file,
                                           std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  MigrationStreamParams params;
  params.sequence_length = static_cast<int>(cfg.param("n", 20));
  params.points = static_cast<int>(cfg.param("K", 8));
  params.migration_factor = cfg.param("D", 8);
  params.gamma = cfg.param("gamma", 0.5);

  if (kind == StreamKind::file) {
    return migration::eg_sequence_learner(file->request_sequences, *file->metric,
                                          params.migration_factor, params.gamma)
        .ledger;
  }
  const MigrationStream stream = migration_stream(kind, cfg.rounds, params, rng);
  return migration::eg_sequence_learner(stream.request_sequences, stream.metric,
                                        params.migration_factor, params.gamma)
      .ledger;
}

learners::RegretLedger run_scheduling_trial(const ExperimentConfig& cfg,
                                            StreamKind kind, const FileData* file,
                                            std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  SchedulingStreamParams params;
  params.machines = static_cast<int>(cfg.param("m", 4));
  params.f_dim = static_cast<int>(cfg.param("f_dim", 3));
  params.log_weight_cap = cfg.param("B", 2);
  params.comparator_norm = cfg.param("comparator_norm", 2);

  std::vector<scheduling::WeightFeatureRound> rounds;
  Mat planted;
  if (kind == StreamKind::file) {
    rounds = file->scheduling_rounds;
    planted = Mat(params.machines, params.f_dim);  // zero comparator
  } else {
    SchedulingStream stream = scheduling_stream(kind, cfg.rounds, params, rng);
    rounds = std::move(stream.rounds);
    planted = std::move(stream.planted_map);
  }

  const std::string learner = cfg.param_str("learner", "ktoco");
  if (learner == "ogd") {
    scheduling::OgdMatrixOptions options;
    options.comparator_hint = &planted;
    return scheduling::ogd_bounded_matrix_learner(rounds, params.machines,
                                                  params.f_dim,
                                                  params.log_weight_cap, options)
        .ledger;
  }
  return scheduling::ktoco_logit_learner(rounds, params.machines, params.f_dim,
                                         planted)
      .ledger;
}

learners::RegretLedger run_rr_trial(const ExperimentConfig& cfg, StreamKind kind,
                                    const FileData* file, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  RrStreamParams params;
  params.error_cap = cfg.param("B", 1);
  const std::vector<scheduling::LambdaRound> rounds =
      kind == StreamKind::file ? file->rr_rounds
                               : rr_stream(kind, cfg.rounds, params, rng);
  return scheduling::lambda_forecaster(rounds, params.error_cap, rng).ledger;
}

learners::RegretLedger run_ski_trial(const ExperimentConfig& cfg, StreamKind kind,
                                     const FileData* file, std::uint64_t trial_seed,
                                     std::string* note) {
  Rng rng(trial_seed);
  SkiStreamParams params;
  params.days_max = cfg.param("N", 20);
  params.price_max = cfg.param("B", 10);
  params.discrete = cfg.problem == "ski-discrete";

  const std::vector<skirental::SkiSeason> seasons =
      kind == StreamKind::file ? file->seasons
                               : ski_stream(kind, cfg.rounds, params, rng);

  if (params.discrete) {
    return skirental::discrete_grid_learner(
               seasons, static_cast<int>(params.days_max), params.price_max, rng)
        .ledger;
  }

  const double beta = cfg.param("beta", 0.5);
  Vec days;
  days.reserve(seasons.size());
  for (const auto& s : seasons) days.push_back(s.days);
  const auto dispersion = skirental::dispersion_check(
      days, beta, static_cast<int>(seasons.size()), cfg.param("dispersion_c", 4));
  if (note != nullptr) {
    *note = std::string("dispersion ") + (dispersion.pass ? "pass" : "FAIL") +
            " (max ball " + std::to_string(dispersion.max_ball_count) + ")";
  }

  skirental::ContinuousForecasterOptions options;
  options.x_points = static_cast<int>(cfg.param("x_points", 0));
  options.lambda_points = static_cast<int>(cfg.param("lambda_points", 0));
  options.bound_c1 = cfg.param("c1", 1);
  options.bound_c2 = cfg.param("c2", 1);
  return skirental::continuous_forecaster(seasons, params.days_max,
                                          params.price_max, beta, rng, options)
      .ledger;
}

learners::RegretLedger run_perm_trial(const ExperimentConfig& cfg, StreamKind kind,
                                      const FileData* file,
                                      std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  PermStreamParams params;
  params.jobs = static_cast<int>(cfg.param("n", 5));
  params.weight_cap = cfg.param("W", 1);
  params.processing_cap = cfg.param("P", 1);
  const std::vector<permutations::JobBatch> batches =
      kind == StreamKind::file ? file->batches
                               : perm_stream(kind, cfg.rounds, params, rng);
  return permutations::perm_eg_learner(batches, params.jobs, params.weight_cap,
                                       params.processing_cap, rng)
      .ledger;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, StreamKind kind,
                       const FileData* file, int trial) {
  TrialOutcome outcome;
  outcome.trial = trial;
  const std::uint64_t trial_seed = derive_seed(cfg.seed, trial);

  if (cfg.rounds == 0) {
    outcome.ledger.bound_value = 0.0;
    outcome.final_regret = 0.0;
    outcome.pass = true;
    return outcome;
  }

  if (cfg.problem == "matching" || cfg.problem == "bmatching")
    outcome.ledger = run_matching_trial(cfg, kind, file, trial_seed);
  else if (cfg.problem == "migration")
    outcome.ledger = run_migration_trial(cfg, kind, file, trial_seed);
  else if (cfg.problem == "scheduling")
    outcome.ledger = run_scheduling_trial(cfg, kind, file, trial_seed);
  else if (cfg.problem == "rr")
    outcome.ledger = run_rr_trial(cfg, kind, file, trial_seed);
  else if (cfg.problem == "ski-discrete" || cfg.problem == "ski-continuous")
    outcome.ledger = run_ski_trial(cfg, kind, file, trial_seed, &outcome.note);
  else if (cfg.problem == "perm")
    outcome.ledger = run_perm_trial(cfg, kind, file, trial_seed);
  else
    throw std::invalid_argument("unknown problem " + cfg.problem);

  const auto report = learners::regret_report(outcome.ledger);
  outcome.final_regret = report.regret;
  outcome.pass = report.satisfied || report.degenerate;
  return outcome;
}

void write_csv(const ExperimentConfig& cfg, const std::vector<TrialOutcome>& trials,
               int effective_rounds) {
  std::ofstream out(cfg.out_path);
  if (!out) throw std::runtime_error("cannot write " + cfg.out_path);
  out << "# problem=" << cfg.problem << '\n';
  out << "# T=" << effective_rounds << '\n';
  out << "# seed=" << cfg.seed << '\n';
  out << "# trials=" << cfg.trials << '\n';
  out << "# stream=" << cfg.stream << '\n';
  for (const auto& [key, value] : resolved_params(cfg))
    out << "# param:" << key << '=' << value << '\n';
  out << "trial,t,loss,cum_loss,comparator_loss,regret,bound,action_digest\n";
  for (const auto& trial : trials) {
    double cum = 0.0, comp_cum = 0.0;
    for (std::size_t i = 0; i < trial.ledger.rounds.size(); ++i) {
      const auto& r = trial.ledger.rounds[i];
      cum += r.loss;
      comp_cum += i < trial.ledger.comparator_round_losses.size()
                      ? trial.ledger.comparator_round_losses[i]
                      : 0.0;
      char digest[32];
      std::snprintf(digest, sizeof(digest), "%016llx",
                    static_cast<unsigned long long>(r.action_digest));
      out << trial.trial << ',' << r.round << ',' << format_double(r.loss) << ','
          << format_double(cum) << ',' << format_double(comp_cum) << ','
          << format_double(cum - comp_cum) << ','
          << format_double(trial.ledger.bound_value) << ',' << digest << '\n';
    }
  }
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  const StreamKind kind = parse_stream_kind(config.stream);

  FileData file_data;
  const FileData* file = nullptr;
  ExperimentConfig cfg = config;
  if (kind == StreamKind::file) {
    file_data = load_file_data(config);
    cfg.rounds = file_data.rounds;
    file = &file_data;
  }

  ExperimentOutcome outcome;
  outcome.config = cfg;
  outcome.trials.resize(cfg.trials);

  const int want_threads = static_cast<int>(cfg.param("threads", 0));
  const int hardware = std::max(1u, std::thread::hardware_concurrency());
  const int thread_count =
      std::max(1, std::min(cfg.trials, want_threads > 0 ? want_threads : hardware));

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        outcome.trials[i] = run_trial(cfg, kind, file, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (int w = 0; w < thread_count; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  outcome.all_pass = true;
  for (const auto& t : outcome.trials) outcome.all_pass = outcome.all_pass && t.pass;
  write_csv(cfg, outcome.trials, cfg.rounds);
  return outcome;
}

void print_outcome(std::ostream& out, const ExperimentOutcome& outcome) {
  out << "problem=" << outcome.config.problem << " T=" << outcome.config.rounds
      << " trials=" << outcome.config.trials << " stream=" << outcome.config.stream
      << " out=" << outcome.config.out_path << '\n';
  for (const auto& t : outcome.trials) {
    out << "  trial " << t.trial << ": regret=" << format_double(t.final_regret)
        << " bound=" << format_double(t.ledger.bound_value) << ' '
        << (t.pass ? "PASS" : "FAIL");
    if (!t.note.empty()) out << "  [" << t.note << ']';
    out << '\n';
  }
  out << (outcome.all_pass ? "all bound checks passed" : "BOUND CHECK FAILED")
      << '\n';
}

SummaryReport summarize(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("summarize: cannot open " + csv_path);

  SummaryReport report;
  std::map<std::string, std::string> params;
  std::map<int, TrialSummary> last_rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      std::string key = trim(t.substr(1, eq - 1));
      const std::string value = trim(t.substr(eq + 1));
      if (key == "problem") report.problem = value;
      else if (key == "T") report.rounds = std::stoi(value);
      else if (key.rfind("param:", 0) == 0) params[key.substr(6)] = value;
      continue;
    }
    if (!header_seen) {
      if (t.rfind("trial,", 0) != 0)
        throw std::runtime_error("summarize: line " + std::to_string(line_no) +
                                 ": expected header row");
      header_seen = true;
      continue;
    }
    std::istringstream row(t);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw std::runtime_error("summarize: line " + std::to_string(line_no) +
                               ": expected 8 fields, got " +
                               std::to_string(fields.size()));
    try {
      TrialSummary s;
      s.trial = std::stoi(fields[0]);
      (void)std::stoi(fields[1]);
      (void)std::stod(fields[2]);
      (void)std::stod(fields[3]);
      (void)std::stod(fields[4]);
      s.final_regret = std::stod(fields[5]);
      s.bound = std::stod(fields[6]);
      if (fields[7].size() != 16)
        throw std::invalid_argument("bad digest");
      s.pass = s.final_regret <= s.bound;
      last_rows[s.trial] = s;
    } catch (const std::exception&) {
      throw std::runtime_error("summarize: line " + std::to_string(line_no) +
                               ": malformed row");
    }
  }
  if (!header_seen)
    throw std::runtime_error("summarize: missing header row");

  double recomputed = 0.0;
  bool have_recomputed = false;
  if (!report.problem.empty() && !last_rows.empty()) {
    recomputed = recompute_bound(report.problem, report.rounds, params);
    have_recomputed = true;
  }

  double total = 0.0;
  report.max_regret = -std::numeric_limits<double>::infinity();
  for (const auto& [trial, row] : last_rows) {
    report.trials.push_back(row);
    total += row.final_regret;
    report.max_regret = std::max(report.max_regret, row.final_regret);
    report.all_pass = report.all_pass && row.pass;
    if (have_recomputed) {
      const double tol = 1e-9 * std::max(1.0, std::fabs(recomputed));
      if (std::fabs(row.bound - recomputed) > tol) report.bounds_match = false;
    }
  }
  if (!report.trials.empty()) {
    report.mean_regret = total / static_cast<double>(report.trials.size());
    double passed = 0.0;
    for (const auto& s : report.trials) passed += s.pass ? 1.0 : 0.0;
    report.pass_rate = passed / static_cast<double>(report.trials.size());
  } else {
    report.max_regret = 0.0;
  }
  report.all_pass = report.all_pass && report.bounds_match;
  return report;
}

void print_summary(std::ostream& out, const SummaryReport& report) {
  out << "problem=" << report.problem << " T=" << report.rounds << " trials="
      << report.trials.size() << '\n';
  out << "trial,final_regret,bound,pass\n";
  for (const auto& s : report.trials)
    out << s.trial << ',' << format_double(s.final_regret) << ','
        << format_double(s.bound) << ',' << (s.pass ? "pass" : "FAIL") << '\n';
  if (!report.trials.empty()) {
    out << "mean_regret=" << format_double(report.mean_regret)
        << " max_regret=" << format_double(report.max_regret)
        << " pass_rate=" << format_double(report.pass_rate) << '\n';
    out << "bound column " << (report.bounds_match ? "matches" : "MISMATCHES")
        << " the recomputed closed form\n";
  } else {
    out << "empty summary\n";
  }
}

}  // namespace predlearn::harness
