#include "lpbf/ppo/update.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lpbf/ppo/gae.hpp"

namespace lpbf::ppo {

void PPOConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) throw InvalidArgument("ppo clip must lie in (0, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("ppo gamma must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("ppo lambda must lie in [0, 1]");
  if (epochs < 1) throw InvalidArgument("ppo epochs must be >= 1");
  if (minibatch < 1) throw InvalidArgument("ppo minibatch must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("ppo learning rate must be > 0");
  if (n_envs < 1) throw InvalidArgument("ppo n_envs must be >= 1");
  if (n_updates < 0) throw InvalidArgument("ppo n_updates must be >= 0");
  if (!(value_coef >= 0.0) || !(entropy_coef >= 0.0))
    throw InvalidArgument("ppo loss coefficients must be >= 0");
  if (hidden < 1) throw InvalidArgument("ppo hidden width must be >= 1");
  if (!std::isfinite(init_log_std)) throw InvalidArgument("ppo init_log_std must be finite");
}

void RolloutBuffer::append(const RolloutBuffer& o) {
  if (size() == 0) obs_size = o.obs_size;
  if (o.obs_size != obs_size) throw LengthMismatch("buffers hold different observation sizes");
  observations.insert(observations.end(), o.observations.begin(), o.observations.end());
  actions.insert(actions.end(), o.actions.begin(), o.actions.end());
  log_probs.insert(log_probs.end(), o.log_probs.begin(), o.log_probs.end());
  rewards.insert(rewards.end(), o.rewards.begin(), o.rewards.end());
  values.insert(values.end(), o.values.begin(), o.values.end());
  dones.insert(dones.end(), o.dones.begin(), o.dones.end());
  advantages.insert(advantages.end(), o.advantages.begin(), o.advantages.end());
  returns.insert(returns.end(), o.returns.begin(), o.returns.end());
}

void RolloutBuffer::validate() const {
  const std::size_t n = size();
  if (observations.size() != n * static_cast<std::size_t>(obs_size) || actions.size() != n ||
      log_probs.size() != n || values.size() != n || dones.size() != n)
    throw LengthMismatch("rollout buffer fields have inconsistent lengths");
  if (!advantages.empty() && (advantages.size() != n || returns.size() != n))
    throw LengthMismatch("rollout buffer advantages have the wrong length");
}

void compute_advantages(RolloutBuffer& buf, double gamma, double lambda) {
  buf.validate();
  auto est = gae(buf.rewards, buf.values, buf.dones, gamma, lambda);
  buf.advantages = std::move(est.advantages);
  buf.returns = std::move(est.returns);
}

double clipped_objective(double ratio, double advantage, double eps) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - eps, 1.0 + eps) * advantage);
}

LossBreakdown ppo_loss(const PolicyParams& p, const RolloutBuffer& buf,
                       std::span<const double> adv, std::span<const std::size_t> idx,
                       const PPOConfig& cfg, Eigen::VectorXd* grad) {
  const auto batch = static_cast<Eigen::Index>(idx.size());
  if (batch == 0) throw InvalidArgument("empty minibatch");
  const double inv_b = 1.0 / static_cast<double>(batch);
  Eigen::MatrixXd x(buf.obs_size, batch);
  for (Eigen::Index c = 0; c < batch; ++c) {
    auto o = buf.observation(idx[static_cast<std::size_t>(c)]);
    x.col(c) = Eigen::Map<const Eigen::VectorXd>(o.data(), buf.obs_size);
  }
  Mlp::Tape tp, tv;
  const Eigen::MatrixXd mu = p.policy.forward(x, grad ? &tp : nullptr);
  const Eigen::MatrixXd v = p.value.forward(x, grad ? &tv : nullptr);
  const double s = p.log_std;
  const double var = std::exp(2.0 * s);

  LossBreakdown out;
  Eigen::MatrixXd d_mu(1, batch), d_v(1, batch);
  double d_s = 0.0;
  for (Eigen::Index c = 0; c < batch; ++c) {
    const std::size_t i = idx[static_cast<std::size_t>(c)];
    const double a = buf.actions[i];
    const double m = mu(0, c);
    const double lp = gaussian_log_prob(a, m, s);
    const double ratio = std::exp(lp - buf.log_probs[i]);
    const double A = adv[i];
    out.policy -= clipped_objective(ratio, A, cfg.clip) * inv_b;
    // gradient flows only through the unclipped branch when it is the minimum
    const bool active = ratio * A <= std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * A;
    const double d_lp = active ? -ratio * A * inv_b : 0.0;
    d_mu(0, c) = d_lp * (a - m) / var;
    d_s += d_lp * ((a - m) * (a - m) / var - 1.0);
    if (std::abs(ratio - 1.0) > cfg.clip) out.clip_fraction += inv_b;
    out.approx_kl += (buf.log_probs[i] - lp) * inv_b;

    const double err = v(0, c) - buf.returns[i];
    out.value += err * err * inv_b;
    d_v(0, c) = cfg.value_coef * 2.0 * err * inv_b;
  }
  out.entropy = gaussian_entropy(s);
  out.total = out.policy + cfg.value_coef * out.value - cfg.entropy_coef * out.entropy;
  d_s -= cfg.entropy_coef;

  if (grad) {
    auto gp = p.policy.zero_like();
    auto gv = p.value.zero_like();
    p.policy.backward(tp, d_mu, gp);
    p.value.backward(tv, d_v, gv);
    grad->resize(static_cast<Eigen::Index>(p.parameter_count()));
    write_layers(gp, grad->data());
    const auto np = static_cast<Eigen::Index>(p.policy.parameter_count());
    (*grad)(np) = d_s;
    write_layers(gv, grad->data() + np + 1);
  }
  return out;
}

UpdateStats ppo_update(PolicyParams& p, AdamState& adam, const RolloutBuffer& buf,
                       const PPOConfig& cfg, std::uint64_t shuffle_seed) {
  buf.validate();
  const std::size_t n = buf.size();
  if (n == 0 || buf.advantages.size() != n) throw InvalidArgument("buffer has no advantages");

  const double mean = std::accumulate(buf.advantages.begin(), buf.advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : buf.advantages) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> adv(n);
  for (std::size_t i = 0; i < n; ++i) adv[i] = (buf.advantages[i] - mean) / (sd + 1e-8);

  PolicyParams q = p;
  AdamState st = adam;
  if (st.m.size() == 0) st = AdamState::zeros(static_cast<Eigen::Index>(q.parameter_count()));
  std::mt19937_64 rng(shuffle_seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  UpdateStats stats;
  Eigen::VectorXd g;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    LossBreakdown acc;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
      const std::size_t len = std::min<std::size_t>(cfg.minibatch, n - start);
      std::span<const std::size_t> idx(order.data() + start, len);
      const auto l = ppo_loss(q, buf, adv, idx, cfg, &g);
      if (!g.allFinite()) throw NonFiniteGradient("PPO gradient became non-finite");
      const double w = static_cast<double>(len) / n;
      acc.policy += w * l.policy;
      acc.value += w * l.value;
      acc.entropy += w * l.entropy;
      acc.total += w * l.total;
      acc.clip_fraction += w * l.clip_fraction;
      acc.approx_kl += w * l.approx_kl;

      Eigen::VectorXd flat = q.flatten();
      if (cfg.optimizer == Optimizer::Adam)
        adam_step(flat, g, st, cfg.learning_rate);
      else
        sgd_step(flat, g, cfg.learning_rate);
      if (!flat.allFinite()) throw NonFiniteGradient("PPO step produced non-finite parameters");
      q.unflatten(flat);
      q.clamp_log_std();
      ++stats.steps;
    }
    stats.last = acc;
  }
  p = std::move(q);
  adam = std::move(st);
  return stats;
}

}  // namespace lpbf::ppo
