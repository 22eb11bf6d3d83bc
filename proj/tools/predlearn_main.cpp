// Command-line front end: run one experiment per invocation and emit the
// per-round CSV, or summarize an existing CSV.
//
//   predlearn <problem> --config PATH [--T n] [--seed s] [--trials k]
//             [--out PATH] [--stream kind] [--param key=value ...]
//   predlearn summarize PATH
//
// Exit code 0 iff every trial's measured regret stays within its closed-form
// bound (and, for summarize, the file parses and all rows pass).

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "predlearn/experiment.hpp"

namespace {

int run_summarize(const std::string& path) {
  const auto report = predlearn::harness::summarize(path);
  predlearn::harness::print_summary(std::cout, report);
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for online learning of algorithm predictions"};
  app.require_subcommand(1);

  std::string summarize_path;
  auto* summarize_cmd = app.add_subcommand("summarize", "aggregate a result CSV");
  summarize_cmd->add_option("csv", summarize_path, "path to the CSV")->required();

  const std::vector<std::string> problems = {
      "matching", "bmatching",    "migration",      "scheduling",
      "rr",       "ski-discrete", "ski-continuous", "perm"};

  struct RunArgs {
    std::string config_path;
    int rounds = -1;
    std::int64_t seed = -1;
    int trials = -1;
    std::string out_path;
    std::string stream;
    std::vector<std::string> overrides;
  };
  std::vector<RunArgs> args(problems.size());
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    auto* cmd = app.add_subcommand(problems[i], "run the " + problems[i] + " experiment");
    cmd->add_option("--config", args[i].config_path, "key=value config file");
    cmd->add_option("--T", args[i].rounds, "rounds per trial");
    cmd->add_option("--seed", args[i].seed, "top-level seed");
    cmd->add_option("--trials", args[i].trials, "trial count");
    cmd->add_option("--out", args[i].out_path, "output CSV path");
    cmd->add_option("--stream", args[i].stream,
                    "iid | drifting | adversarial | file");
    cmd->add_option("--param", args[i].overrides, "extra key=value override");
    commands.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (summarize_cmd->parsed()) return run_summarize(summarize_path);

    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (!commands[i]->parsed()) continue;
      predlearn::harness::ExperimentConfig cfg;
      if (!args[i].config_path.empty())
        cfg = predlearn::harness::ExperimentConfig::from_file(args[i].config_path);
      cfg.problem = problems[i];
      if (args[i].rounds >= 0) cfg.rounds = args[i].rounds;
      if (args[i].seed >= 0) cfg.seed = static_cast<std::uint64_t>(args[i].seed);
      if (args[i].trials >= 0) cfg.trials = args[i].trials;
      if (!args[i].out_path.empty()) cfg.out_path = args[i].out_path;
      if (!args[i].stream.empty()) cfg.stream = args[i].stream;
      for (const auto& o : args[i].overrides) cfg.apply_override(o);

      const auto outcome = predlearn::harness::run_experiment(cfg);
      predlearn::harness::print_outcome(std::cout, outcome);
      return outcome.all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
