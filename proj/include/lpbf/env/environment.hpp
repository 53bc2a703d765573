#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include "lpbf/env/observation.hpp"
#include "lpbf/env/reward.hpp"
#include "lpbf/episodic_env.hpp"
#include "lpbf/meltpool/meltpool.hpp"
#include "lpbf/scanpath/scanpath.hpp"
#include "lpbf/thermal/simulator.hpp"

namespace lpbf::env {

class EpisodeFinished : public Error {
 public:
  using Error::Error;
};

struct EnvConfig {
  thermal::MaterialParams material;
  thermal::LaserParams laser;
  thermal::GridSpec grid;
  thermal::BoundaryCondition boundary;
  scanpath::ScanPath path;
  VelocityBounds velocity;
  RewardConfig reward;
  ObservationSpec observation;

  void validate() const;
};

/// One row of the per-step episode log.
struct StepRecord {
  int step = 0;
  Vec2 laser_um;
  double velocity = 0.0;  // m/s actually simulated
  double depth_um = 0.0;
  double reward = 0.0;
};

/// CSV `step,x_um,y_um,v_mps,depth_um,reward`.
void write_episode_csv(std::ostream& out, const std::vector<StepRecord>& log);
void write_episode_csv(const std::filesystem::path& path, const std::vector<StepRecord>& log);

/// One laser pass over a scan path, one control interval per step.
class Environment : public EpisodicEnv {
 public:
  explicit Environment(EnvConfig cfg,
                       std::shared_ptr<thermal::LineSolutionCache> cache = nullptr);

  std::size_t observation_size() const override;
  std::vector<double> reset(std::uint64_t seed) override;
  StepOutcome step(double action) override;

  /// Steps at a velocity directly, bypassing the action map.
  StepOutcome step_velocity(double velocity);

  bool done() const { return cursor_ >= cfg_.path.controls().size(); }
  std::size_t episode_length() const { return cfg_.path.controls().size(); }
  std::size_t cursor() const { return cursor_; }
  std::uint64_t seed() const { return seed_; }
  double time_s() const { return time_s_; }

  const EnvConfig& config() const { return cfg_; }
  const thermal::TemperatureField& field() const { return field_; }
  const meltpool::MeltDepthTrace& trace() const { return trace_; }
  const std::vector<StepRecord>& log() const { return log_; }
  const std::shared_ptr<thermal::LineSolutionCache>& cache() const { return sim_.cache(); }

  /// Whitened observation of the current history.
  std::vector<double> observation() const;

 private:
  EnvConfig cfg_;
  thermal::Simulator sim_;
  thermal::TemperatureField field_;
  std::vector<PlaneMaps> history_;
  meltpool::MeltDepthTrace trace_;
  std::vector<StepRecord> log_;
  std::size_t cursor_ = 0;
  double time_s_ = 0.0;
  std::uint64_t seed_ = 0;
};

}  // namespace lpbf::env
