#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lpbf/ppo/adam.hpp"
#include "lpbf/ppo/policy.hpp"

namespace lpbf::ppo {

class NonFiniteGradient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class Optimizer { Adam, Sgd };

struct PPOConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  int epochs = 10;
  int minibatch = 64;
  double learning_rate = 3e-4;
  int n_envs = 4;
  int n_updates = 500;
  std::uint64_t seed = 0;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  Optimizer optimizer = Optimizer::Adam;
  int hidden = 64;
  double init_log_std = -1.0;

  void validate() const;
  bool operator==(const PPOConfig&) const = default;
};

/// Transitions from one or more complete trajectories, stored step by step.
struct RolloutBuffer {
  int obs_size = 0;
  std::vector<double> observations;  // obs_size values per step
  std::vector<double> actions;       // raw Gaussian draws (before clamping)
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<bool> dones;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return rewards.size(); }
  std::span<const double> observation(std::size_t i) const {
    return {observations.data() + i * static_cast<std::size_t>(obs_size),
            static_cast<std::size_t>(obs_size)};
  }
  void append(const RolloutBuffer& other);
  /// Throws LengthMismatch when the per-step fields disagree in length.
  void validate() const;
};

/// Fills advantages and returns by GAE over the stored trajectories.
void compute_advantages(RolloutBuffer& buf, double gamma, double lambda);

/// min(ratio A, clip(ratio, 1 - eps, 1 + eps) A).
double clipped_objective(double ratio, double advantage, double eps);

struct LossBreakdown {
  double policy = 0.0;   // -mean clipped objective
  double value = 0.0;    // mean squared error, unweighted
  double entropy = 0.0;
  double total = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

/// PPO loss over the samples `idx` of the buffer, using `advantages` in
/// place of buf.advantages. Writes the gradient in PolicyParams::flatten
/// order when `grad` is given.
LossBreakdown ppo_loss(const PolicyParams& p, const RolloutBuffer& buf,
                       std::span<const double> advantages, std::span<const std::size_t> idx,
                       const PPOConfig& cfg, Eigen::VectorXd* grad = nullptr);

struct UpdateStats {
  LossBreakdown last;  // averaged over the final epoch
  int steps = 0;       // optimizer steps taken
};

/// Epochs of shuffled minibatch steps on the clipped surrogate. Advantages
/// are normalised once over the whole buffer first. Parameters are only
/// replaced when every step stayed finite.
UpdateStats ppo_update(PolicyParams& p, AdamState& adam, const RolloutBuffer& buf,
                       const PPOConfig& cfg, std::uint64_t shuffle_seed);

}  // namespace lpbf::ppo
