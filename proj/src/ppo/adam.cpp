#include "lpbf/ppo/adam.hpp"

#include <cmath>

#include "lpbf/common.hpp"

namespace lpbf::ppo {

AdamState AdamState::zeros(Eigen::Index n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& st, double lr,
               const AdamSettings& s) {
  if (st.m.size() != params.size() || grad.size() != params.size())
    throw InvalidArgument("optimizer state does not match the parameter count");
  ++st.step;
  st.m = s.beta1 * st.m + (1.0 - s.beta1) * grad;
  st.v = s.beta2 * st.v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(st.step));
  params.array() -= lr * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + s.epsilon);
}

void sgd_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  params -= lr * grad;
}

}  // namespace lpbf::ppo
