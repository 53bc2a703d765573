#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace lpbf::ppo {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates with their step count.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;

  static AdamState zeros(Eigen::Index n);
};

/// One bias-corrected Adam step that lowers the loss whose gradient is given.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, double lr,
               const AdamSettings& s = {});

/// Plain gradient descent step.
void sgd_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);

}  // namespace lpbf::ppo
