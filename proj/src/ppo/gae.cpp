#include "lpbf/ppo/gae.hpp"

namespace lpbf::ppo {

AdvantageEstimate gae(std::span<const double> rewards, std::span<const double> values,
                      const std::vector<bool>& dones, double gamma, double lambda, double bootstrap) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw LengthMismatch("rewards, values and dones must have equal length");
  AdvantageEstimate out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double live = dones[t] ? 0.0 : 1.0;
    const double next_value = t + 1 < n ? values[t + 1] : bootstrap;
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[t] = next_adv;
    out.returns[t] = next_adv + values[t];
  }
  return out;
}

}  // namespace lpbf::ppo
