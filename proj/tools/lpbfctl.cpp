#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lpbf/cli/commands.hpp"
#include "lpbf/ppo/checkpoint.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace lpbf;
  CLI::App app{"Laser scan-velocity control: thermal simulation and PPO training"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path, out, checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<double> velocity, target_depth;
  std::optional<int> updates;
  app.add_option("--config", config_path, "YAML run configuration (defaults when omitted)");
  app.add_option("--seed", seed, "Seed overriding the config");
  app.add_option("--out", out, "Output directory (config output_dir when omitted)");
  app.add_option("--checkpoint", checkpoint, "Checkpoint to evaluate or to resume training from");
  app.add_option("--velocity", velocity, "Scan velocity in m/s for simulate and calibrate");
  app.add_option("--updates", updates, "Total PPO updates, overriding the config");

  auto* simulate = app.add_subcommand("simulate", "Run the scan path at a constant velocity");
  auto* calibrate = app.add_subcommand("calibrate", "Find the laser power giving the target depth");
  calibrate->add_option("--target-depth", target_depth, "Target depth in um");
  auto* train = app.add_subcommand("train", "Train a velocity policy with PPO");
  auto* evaluate = app.add_subcommand("evaluate", "Compare a policy with constant velocities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    cli::RunConfig cfg = config_path ? cli::load_config(*config_path) : cli::RunConfig{};
    if (seed) cfg.seed = *seed;
    if (updates) cfg.ppo.n_updates = *updates;
    cfg.validate();
    const std::filesystem::path dir = out ? std::filesystem::path(*out) : cfg.output_dir;

    if (*simulate) {
      cli::cmd_simulate(cfg, velocity.value_or(cfg.simulate.velocity), dir, std::cout);
    } else if (*calibrate) {
      cli::cmd_calibrate(cfg, velocity.value_or(cfg.calibrate.velocity),
                         target_depth.value_or(cfg.calibrate.target_depth_um), dir, std::cout);
    } else if (*train) {
      std::optional<std::filesystem::path> resume;
      if (checkpoint) resume = *checkpoint;
      const auto r = cli::cmd_train(cfg, dir, resume, std::cout);
      std::cout << "finished " << r.updates_done << " updates; checkpoint " << r.checkpoint.string()
                << '\n';
    } else if (*evaluate) {
      if (!checkpoint) throw cli::ConfigError("evaluate needs --checkpoint");
      cli::cmd_evaluate(cfg, *checkpoint, dir, std::cout);
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
