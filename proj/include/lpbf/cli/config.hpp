#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lpbf/env/environment.hpp"
#include "lpbf/ppo/update.hpp"
#include "lpbf/scanpath/scanpath.hpp"

namespace lpbf::cli {

/// Malformed, unknown or invalid configuration; the message names the line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct PathConfig {
  enum class Kind { CrossHatch, Triangles };
  Kind kind = Kind::CrossHatch;
  double interval_um = 50.0;

  // cross hatch
  double length_um = 1250.0;
  double hatch_um = 125.0;
  int rows = 10;

  // concentric triangles
  double domain_um = 1250.0;
  double first_fraction = 0.75;
  double shrink = 0.75;
  double interior_angle_deg = 60.0;
  double min_length_um = 50.0;

  scanpath::ScanPath build() const;
  bool operator==(const PathConfig&) const = default;
};

struct SimulateSettings {
  double velocity = 1.05;               // m/s
  std::vector<double> snapshot_times_s;  // field dumps after the step reaching each time
  bool operator==(const SimulateSettings&) const = default;
};

struct CalibrateSettings {
  double velocity = 1.05;  // m/s
  double target_depth_um = 55.0;
  double track_length_um = 600.0;
  double max_power = 5000.0;  // W, upper end of the bisection bracket
  double tolerance_um = 0.5;
  bool operator==(const CalibrateSettings&) const = default;
};

struct TrainSettings {
  int checkpoint_every = 25;  // updates between checkpoints
  bool operator==(const TrainSettings&) const = default;
};

struct EvaluateSettings {
  std::vector<double> baseline_velocities{0.1, 0.575, 1.05, 1.525, 2.0};  // even over the bounds
  double histogram_bin_um = 5.0;
  double turnaround_radius_um = 100.0;
  bool operator==(const EvaluateSettings&) const = default;
};

struct RunConfig {
  thermal::MaterialParams material;
  thermal::LaserParams laser{1093.75, 13.75};  // calibrated: 55 um at 1.05 m/s
  thermal::GridSpec grid;
  thermal::BoundaryCondition boundary;
  PathConfig path;
  env::VelocityBounds velocity;
  env::RewardConfig reward;
  env::ObservationSpec observation;
  ppo::PPOConfig ppo;
  std::filesystem::path output_dir = "runs";
  std::uint64_t seed = 0;

  SimulateSettings simulate;
  CalibrateSettings calibrate;
  TrainSettings train;
  EvaluateSettings evaluate;

  /// Throws ConfigError naming the offending section.
  void validate() const;
  env::EnvConfig env_config() const;
  /// PPO settings with the run seed applied.
  ppo::PPOConfig ppo_config() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses YAML text; every section and key is optional, unknown keys fail.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& file);
/// YAML text that parses back to an equal RunConfig.
std::string emit_config(const RunConfig& cfg);
void save_config(const std::filesystem::path& file, const RunConfig& cfg);

}  // namespace lpbf::cli
