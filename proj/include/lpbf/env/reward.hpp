#pragma once

#include <optional>
#include <span>
#include <vector>

namespace lpbf::env {

struct VelocityBounds {
  double v_min = 0.1;  // m/s
  double v_max = 2.0;

  void validate() const;
  bool operator==(const VelocityBounds&) const = default;
};

/// Affine map of an action in [-1, 1] onto [v_min, v_max]; actions outside
/// the range are clamped first.
double rescale_action(double action, const VelocityBounds& b);

struct RewardConfig {
  double target_depth_um = 55.0;
  double range_weight = 1.0;
  /// Divides the depth spread in the terminal penalty; the target if unset.
  std::optional<double> range_normalizer_um;

  double normalizer() const { return range_normalizer_um.value_or(target_depth_um); }
  void validate() const;
  bool operator==(const RewardConfig&) const = default;
};

/// 1 - |target - depth| / (target / 2).
double step_reward(double depth_um, const RewardConfig& cfg);

/// weight * (max - min) / normalizer over a whole episode.
double range_penalty(double max_depth_um, double min_depth_um, const RewardConfig& cfg);

/// Rewards an episode emits, one per depth sample: the tracking term, with
/// the range penalty folded into the last one.
std::vector<double> step_rewards(std::span<const double> depths_um, const RewardConfig& cfg);

/// Sum of step_rewards, accumulated front to back.
double episode_return(std::span<const double> depths_um, const RewardConfig& cfg);

}  // namespace lpbf::env
