#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "lpbf/cli/config.hpp"
#include "lpbf/cli/evaluation.hpp"

namespace lpbf::cli {

/// The target depth lies outside what the power bracket can reach.
class NotBracketed : public Error {
 public:
  using Error::Error;
};

/// Constant-velocity run of the configured path. Writes `trace.csv`,
/// `episode.csv`, `path.csv`, `summary.csv` and `snapshot_<k>.msrl` /
/// `snapshot_<k>_surface.csv` for each configured snapshot time.
RunResult cmd_simulate(const RunConfig& cfg, double velocity, const std::filesystem::path& out,
                       std::ostream& log);

/// Melt depth at the end of a straight track through the domain centre.
double straight_track_depth(const RunConfig& cfg, double power, double velocity,
                            double length_um);

struct Calibration {
  double power = 0.0;  // W
  double depth_um = 0.0;
  int evaluations = 0;
};

/// Bisects the laser power so the straight-track depth hits the target.
/// Writes `calibration.csv` and `calibrated.yaml` (the config with the power).
Calibration cmd_calibrate(const RunConfig& cfg, double velocity, double target_depth_um,
                          const std::filesystem::path& out, std::ostream& log);

struct TrainResult {
  std::size_t updates_done = 0;
  std::filesystem::path checkpoint;
  std::filesystem::path learning_curve;
};

/// Synchronous PPO on the configured path. Writes `checkpoint.bin` (+ JSON
/// sidecar) every few updates and at the end, `learning_curve.csv` with
/// `update,mean_reward,depth_std`, and `config.yaml`. With `resume` the run
/// continues from that checkpoint up to the configured update count.
TrainResult cmd_train(const RunConfig& cfg, const std::filesystem::path& out,
                      const std::optional<std::filesystem::path>& resume, std::ostream& log);

struct EvaluationReport {
  RunResult policy;
  std::vector<RunResult> baselines;
  VelocityContrast velocity;
};

/// Deterministic policy run against the constant-velocity sweep. Writes
/// `policy_episode.csv`, `baseline_<v>.csv`, `velocity_trace.csv`,
/// `depth_histogram.csv` and `summary.csv`.
EvaluationReport cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                              const std::filesystem::path& out, std::ostream& log);

}  // namespace lpbf::cli
