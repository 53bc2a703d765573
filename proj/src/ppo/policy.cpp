#include "lpbf/ppo/policy.hpp"

#include <algorithm>

namespace lpbf::ppo {

PolicyParams PolicyParams::create(int obs_size, int hidden, int depth) {
  std::vector<int> sizes{obs_size};
  for (int i = 0; i < depth; ++i) sizes.push_back(hidden);
  sizes.push_back(1);
  PolicyParams p;
  p.policy = Mlp(sizes, Activation::Tanh, Activation::Tanh);
  p.value = Mlp(sizes, Activation::Tanh, Activation::Identity);
  return p;
}

void PolicyParams::initialize(std::uint64_t seed, double init_log_std) {
  std::mt19937_64 rng(seed);
  policy.init_glorot(rng, 0.01);
  value.init_glorot(rng, 1.0);
  log_std = init_log_std;
  clamp_log_std();
}

std::size_t PolicyParams::parameter_count() const {
  return policy.parameter_count() + 1 + value.parameter_count();
}

Eigen::VectorXd PolicyParams::flatten() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(parameter_count()));
  policy.write_to(out.data());
  const auto np = static_cast<Eigen::Index>(policy.parameter_count());
  out(np) = log_std;
  value.write_to(out.data() + np + 1);
  return out;
}

void PolicyParams::unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
    throw InvalidArgument("parameter vector has the wrong length");
  policy.read_from(flat.data());
  const auto np = static_cast<Eigen::Index>(policy.parameter_count());
  log_std = flat(np);
  value.read_from(flat.data() + np + 1);
}

void PolicyParams::clamp_log_std() { log_std = std::clamp(log_std, kLogStdMin, kLogStdMax); }

PolicyOutput policy_forward(const PolicyParams& p, std::span<const double> obs) {
  if (static_cast<int>(obs.size()) != p.policy.input_size())
    throw InvalidArgument("observation size does not match the policy input");
  const Eigen::Map<const Eigen::VectorXd> x(obs.data(), static_cast<Eigen::Index>(obs.size()));
  if (!x.allFinite()) throw NonFiniteActivation("observation contains non-finite values");
  PolicyOutput out;
  out.mean = p.policy.forward(x)(0, 0);
  out.value = p.value.forward(x)(0, 0);
  out.log_std = p.log_std;
  return out;
}

double gaussian_log_prob(double x, double mean, double log_std) {
  const double z = (x - mean) * std::exp(-log_std);
  return -0.5 * z * z - log_std - 0.5 * std::log(2.0 * kPi);
}

double gaussian_entropy(double log_std) { return log_std + 0.5 * (1.0 + std::log(2.0 * kPi)); }

ActionSample sample_action(double mean, double log_std, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ActionSample s;
  s.raw = mean + std::exp(log_std) * n(rng);
  s.action = std::clamp(s.raw, -1.0, 1.0);
  s.log_prob = gaussian_log_prob(s.raw, mean, log_std);
  return s;
}

}  // namespace lpbf::ppo
