#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "reflectspde/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Penalization schemes for SPDEs reflected at the unit ball"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;

  for (const auto& name : rspde::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "experiment config file")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed (overrides scheme.seed)");
    sub->add_option("--threads", threads, "worker threads (default: $REFLECTSPDE_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  }
  auto* verify = app.add_subcommand("verify", "check artifact checksums against manifest.json");
  std::string dir;
  verify->add_option("dir", dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : rspde::kConfigError;
  }

  if (verify->parsed()) return rspde::verify_manifest(dir, std::cerr) ? 0 : 1;

  const std::string sub = app.get_subcommands().front()->get_name();
  rspde::RunOptions opts;
  if (!out.empty()) opts.out_dir = out;
  if (app.get_subcommands().front()->count("--seed")) opts.seed = seed;
  if (threads > 0) {
    opts.threads = threads;
  } else if (const char* env = std::getenv("REFLECTSPDE_THREADS")) {
    try {
      opts.threads = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "config error: REFLECTSPDE_THREADS must be a positive integer\n";
      return rspde::kConfigError;
    }
    if (opts.threads < 1) {
      std::cerr << "config error: REFLECTSPDE_THREADS must be a positive integer\n";
      return rspde::kConfigError;
    }
  }

  rspde::ExperimentConfig cfg;
  try {
    cfg = rspde::load_config(config);
  } catch (const rspde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rspde::kConfigError;
  }
  return rspde::run_experiment(cfg, sub, opts, std::cerr);
}
