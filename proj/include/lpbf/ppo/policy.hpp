#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

#include "lpbf/ppo/mlp.hpp"

namespace lpbf::ppo {

inline const double kLogStdMin = std::log(1e-3);
inline const double kLogStdMax = std::log(2.0);

/// Gaussian policy with a tanh-squashed mean, a state-independent log
/// standard deviation and a separate value network.
struct PolicyParams {
  Mlp policy;  // obs -> 64 -> 64 -> 1, tanh everywhere
  double log_std = -1.0;
  Mlp value;   // obs -> 64 -> 64 -> 1, linear output

  static PolicyParams create(int obs_size, int hidden, int depth = 2);

  /// Glorot weights with a small policy head so the initial mean is near 0.
  void initialize(std::uint64_t seed, double init_log_std);

  std::size_t parameter_count() const;
  /// Storage order: policy layers, log_std, value layers.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);
  void clamp_log_std();
};

struct PolicyOutput {
  double mean = 0.0;
  double log_std = 0.0;
  double value = 0.0;
};

PolicyOutput policy_forward(const PolicyParams& p, std::span<const double> obs);

/// Log density of N(mean, exp(log_std)^2) at x.
double gaussian_log_prob(double x, double mean, double log_std);

/// Entropy of N(., exp(log_std)^2).
double gaussian_entropy(double log_std);

struct ActionSample {
  double raw = 0.0;     // Gaussian draw
  double action = 0.0;  // raw clamped to [-1, 1]
  double log_prob = 0.0;  // density of the raw draw
};

ActionSample sample_action(double mean, double log_std, std::mt19937_64& rng);

}  // namespace lpbf::ppo
