// Command-line front end: run one configured experiment, or compare traces.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zovr/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order minimax experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string algo, profile, out;
  std::optional<std::int64_t> budget;
  std::vector<std::string> sets;
  CLI::App* run = app.add_subcommand("run", "Run one experiment and write a CSV trace");
  run->add_option("--config", config_path, "key = value config file")->required();
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--algo", algo, "zo-vrgda | zo-isarah | zo-sgda | zo-sgdmsa");
  run->add_option("--profile", profile, "theory | practical");
  run->add_option("--budget", budget, "Query budget");
  run->add_option("--out", out, "Output CSV path");
  run->add_option("--set", sets, "Extra key=value overrides");

  double target = 0.0;
  std::vector<std::string> files;
  CLI::App* compare = app.add_subcommand("compare", "Queries needed to reach a target loss");
  compare->add_option("--target", target, "Target loss")->required();
  compare->add_option("files", files, "Trace CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) {
    zovr::ExperimentConfig cfg;
    try {
      cfg = zovr::load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (!algo.empty()) zovr::set_config_value(cfg, "algorithm", algo);
      if (!profile.empty()) zovr::set_config_value(cfg, "profile", profile);
      if (budget) zovr::set_config_value(cfg, "query_budget", std::to_string(*budget));
      if (!out.empty()) cfg.output = out;
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw zovr::ConfigError("--set expects key=value");
        zovr::set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
      }
    } catch (const zovr::ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    return zovr::run_experiment(cfg, std::cerr).exit_code;
  }

  try {
    const auto rows = zovr::compare_traces(files, target);
    std::cout << "trace,queries_to_target\n";
    for (const auto& r : rows)
      std::cout << r.path << ',' << (r.queries ? std::to_string(*r.queries) : "not reached") << '\n';
  } catch (const zovr::SchemaMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
