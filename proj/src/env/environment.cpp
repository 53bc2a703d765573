#include "lpbf/env/environment.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace lpbf::env {

void EnvConfig::validate() const {
  material.validate();
  laser.validate();
  grid.validate();
  boundary.validate();
  velocity.validate();
  reward.validate();
  observation.validate(grid.dx_um);
  if (path.controls().empty()) throw InvalidArgument("scan path has no control intervals");
  for (const auto& c : path.controls()) {
    if (!grid.contains(c.start) || !grid.contains(c.end)) {
      std::ostringstream msg;
      msg << "scan path point (" << c.end.x << ", " << c.end.y << ") um lies outside the grid";
      throw InvalidArgument(msg.str());
    }
  }
}

void write_episode_csv(std::ostream& out, const std::vector<StepRecord>& log) {
  out << "step,x_um,y_um,v_mps,depth_um,reward\n";
  out << std::setprecision(10);
  for (const auto& r : log)
    out << r.step << ',' << r.laser_um.x << ',' << r.laser_um.y << ',' << r.velocity << ','
        << r.depth_um << ',' << r.reward << '\n';
}

void write_episode_csv(const std::filesystem::path& path, const std::vector<StepRecord>& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  write_episode_csv(out, log);
}

namespace {

std::shared_ptr<thermal::LineSolutionCache> cache_for(
    const EnvConfig& cfg, std::shared_ptr<thermal::LineSolutionCache> cache) {
  if (cache) return cache;
  return std::make_shared<thermal::LineSolutionCache>(cfg.material, cfg.laser, cfg.grid);
}

}  // namespace

Environment::Environment(EnvConfig cfg, std::shared_ptr<thermal::LineSolutionCache> cache)
    : cfg_((cfg.validate(), std::move(cfg))),
      sim_(cfg_.material, cfg_.laser, cfg_.grid, cfg_.boundary, cache_for(cfg_, std::move(cache))),
      field_(cfg_.grid, cfg_.material.ambient_temp) {
  reset(0);
}

std::size_t Environment::observation_size() const {
  return cfg_.observation.size(cfg_.grid.dx_um);
}

std::vector<double> Environment::reset(std::uint64_t seed) {
  seed_ = seed;
  field_.fill(cfg_.material.ambient_temp);
  cursor_ = 0;
  time_s_ = 0.0;
  trace_.clear();
  log_.clear();
  const Vec2 start = cfg_.path.controls().front().start;
  history_.assign(static_cast<std::size_t>(cfg_.observation.history),
                  observe(field_, start, cfg_.observation, cfg_.boundary));
  return observation();
}

std::vector<double> Environment::observation() const { return whiten(flatten(history_)); }

StepOutcome Environment::step(double action) {
  if (done()) throw EpisodeFinished("step called after the last control interval");
  return step_velocity(rescale_action(action, cfg_.velocity));
}

StepOutcome Environment::step_velocity(double velocity) {
  if (done()) throw EpisodeFinished("step called after the last control interval");
  const auto& ctl = cfg_.path.controls()[cursor_];
  const auto r = sim_.advance(field_, ctl.start, ctl.end, velocity);
  time_s_ += r.dt;
  const auto sample = meltpool::measure(field_, cfg_.material, ctl.end, time_s_);
  trace_.push_back(sample);
  ++cursor_;

  double reward = step_reward(sample.depth_um, cfg_.reward);
  if (done()) reward = reward - range_penalty(trace_.max_depth(), trace_.min_depth(), cfg_.reward);

  history_.erase(history_.begin());
  history_.push_back(observe(field_, ctl.end, cfg_.observation, cfg_.boundary));
  log_.push_back({static_cast<int>(cursor_ - 1), ctl.end, velocity, sample.depth_um, reward});
  return {observation(), reward, done()};
}

}  // namespace lpbf::env
