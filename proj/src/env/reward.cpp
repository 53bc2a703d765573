#include "lpbf/env/reward.hpp"

#include <algorithm>
#include <cmath>

#include "lpbf/common.hpp"

namespace lpbf::env {

void VelocityBounds::validate() const {
  if (!(v_min > 0.0 && v_max > v_min)) throw InvalidArgument("velocity bounds need 0 < v_min < v_max");
}

double rescale_action(double action, const VelocityBounds& b) {
  const double a = std::clamp(action, -1.0, 1.0);
  return b.v_min + 0.5 * (a + 1.0) * (b.v_max - b.v_min);
}

void RewardConfig::validate() const {
  if (!(target_depth_um > 0.0)) throw InvalidArgument("target depth must be > 0");
  if (!(range_weight >= 0.0)) throw InvalidArgument("range weight must be >= 0");
  if (range_normalizer_um && !(*range_normalizer_um > 0.0))
    throw InvalidArgument("range normalizer must be > 0");
}

double step_reward(double depth, const RewardConfig& cfg) {
  return 1.0 - std::abs(cfg.target_depth_um - depth) / (0.5 * cfg.target_depth_um);
}

double range_penalty(double max_depth, double min_depth, const RewardConfig& cfg) {
  return cfg.range_weight * (max_depth - min_depth) / cfg.normalizer();
}

std::vector<double> step_rewards(std::span<const double> depths, const RewardConfig& cfg) {
  std::vector<double> out;
  out.reserve(depths.size());
  for (double d : depths) out.push_back(step_reward(d, cfg));
  if (!depths.empty()) {
    const auto [lo, hi] = std::minmax_element(depths.begin(), depths.end());
    out.back() = out.back() - range_penalty(*hi, *lo, cfg);
  }
  return out;
}

double episode_return(std::span<const double> depths, const RewardConfig& cfg) {
  if (depths.empty()) throw InvalidArgument("episode return of an empty trace");
  double total = 0.0;
  for (double r : step_rewards(depths, cfg)) total += r;
  return total;
}

}  // namespace lpbf::env
