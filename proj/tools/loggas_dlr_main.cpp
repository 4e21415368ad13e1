#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "loggas/cli.hpp"
#include "loggas/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"log-gas sampling and resampling experiments"};
  app.require_subcommand(0, 0);

  std::string command;
  std::string config_path;
  loggas::ConfigOverrides ov;

  app.add_option("command", command, "one of: sample, resample, verify-dlr, verify-identity, "
                                     "partition, stats-discrepancy, stats-rigidity, "
                                     "stats-campbell, truncation")
      ->required();
  app.add_option("--config", config_path, "path to a JSON experiment config")->required();
  auto* seed_opt = app.add_option("--seed", ov.seed, "override the config seed");
  auto* workers_opt = app.add_option("--workers", ov.workers, "override the worker count");
  auto* out_opt = app.add_option("--out", ov.out, "override the output directory");
  auto* n_opt = app.add_option("--n", ov.n, "override the particle count");
  auto* beta_opt = app.add_option("--beta", ov.beta, "override the inverse temperature");

  CLI11_PARSE(app, argc, argv);
  ov.has_seed = seed_opt->count() > 0;
  ov.has_workers = workers_opt->count() > 0;
  ov.has_out = out_opt->count() > 0;
  ov.has_n = n_opt->count() > 0;
  ov.has_beta = beta_opt->count() > 0;

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config \"" << config_path << "\"\n";
      return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    loggas::ExperimentConfig cfg = loggas::parse_config(buf.str());
    if (cfg.command.empty()) {
      cfg.command = command;
    } else if (cfg.command != command) {
      std::cerr << "error: config names command \"" << cfg.command
                << "\" but the command line says \"" << command << "\"\n";
      return 2;
    }
    cfg = loggas::apply_overrides(cfg, ov);
    return loggas::execute(cfg, std::cout);
  } catch (const loggas::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
