#pragma once

#include <cstdint>
#include <vector>

#include "lpbf/episodic_env.hpp"
#include "lpbf/ppo/policy.hpp"
#include "lpbf/ppo/update.hpp"

namespace lpbf::ppo {

/// Independent stream for one worker, derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t update, std::uint64_t stream);

struct RolloutResult {
  RolloutBuffer buffer;  // env 0's episode first, then env 1's, ...
  std::vector<double> episode_returns;
  std::vector<std::size_t> episode_lengths;
};

/// Runs every env through one full episode with the stochastic policy, one
/// worker thread per env. Results depend only on (params, seed, update).
RolloutResult collect_rollouts(const std::vector<EpisodicEnv*>& envs, const PolicyParams& p,
                               std::uint64_t seed, std::uint64_t update);

/// Runs one episode with the mean action; returns the rewards.
std::vector<double> run_deterministic(EpisodicEnv& env, const PolicyParams& p,
                                      std::uint64_t seed);

struct UpdateReport {
  std::size_t update = 0;  // 1-based index of the finished update
  std::vector<double> episode_returns;
  double mean_return = 0.0;
  UpdateStats stats;
};

/// Synchronous PPO loop: collect from all envs, then update.
class Trainer {
 public:
  Trainer(PolicyParams params, PPOConfig cfg);
  Trainer(PolicyParams params, AdamState adam, PPOConfig cfg, std::size_t updates_done);

  UpdateReport iterate(const std::vector<EpisodicEnv*>& envs);

  const PolicyParams& params() const { return params_; }
  const AdamState& adam() const { return adam_; }
  const PPOConfig& config() const { return cfg_; }
  std::size_t updates_done() const { return updates_; }

 private:
  PolicyParams params_;
  AdamState adam_;
  PPOConfig cfg_;
  std::size_t updates_ = 0;
};

}  // namespace lpbf::ppo
