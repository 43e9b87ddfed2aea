#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "mwg/error.hpp"

int main(int argc, char** argv) {
  using namespace mwg::cli;

  CLI::App app{"Metropolis-within-Gibbs scaling experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "key = value config file (or a JSON summary)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "overrides run.seed");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* curve = app.add_subcommand("theory-curve", "limiting acceptance and speed over a grid of l");
  auto* sweep = app.add_subcommand("sweep", "empirical acceptance/efficiency sweep over sigma^2");
  auto* tune = app.add_subcommand("tune", "adaptive scale tuning towards a target acceptance");
  auto* mixing = app.add_subcommand("mixing", "autocorrelation time of the coordinate mean versus d");
  auto* selftest = app.add_subcommand("selftest", "fast invariant suite");
  for (auto* sub : {curve, sweep, tune, mixing, selftest}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (selftest->parsed()) {
      const auto out = selftest_command();
      std::cout << out.message;
      return out.exit_code;
    }
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    if (seed) cfg.set("run.seed", std::to_string(*seed));
    if (threads) cfg.set("run.threads", std::to_string(*threads));

    CommandOutput out;
    if (curve->parsed()) out = theory_curve_command(cfg);
    else if (sweep->parsed()) out = sweep_command(cfg);
    else if (tune->parsed()) out = tune_command(cfg);
    else out = mixing_command(cfg);
    write_outputs(out, out_dir);
    std::cout << out.message << '\n';
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mwg::InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
