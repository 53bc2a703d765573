#include "lpbf/ppo/rollout.hpp"

#include <exception>
#include <numeric>
#include <random>
#include <thread>

namespace lpbf::ppo {

namespace {

constexpr std::size_t kMaxEpisodeSteps = 10'000'000;

struct Episode {
  RolloutBuffer buffer;
  double ret = 0.0;
};

Episode run_episode(EpisodicEnv& env, const PolicyParams& p, std::uint64_t reset_seed,
                    std::uint64_t action_seed) {
  std::mt19937_64 rng(action_seed);
  Episode ep;
  ep.buffer.obs_size = static_cast<int>(env.observation_size());
  auto obs = env.reset(reset_seed);
  for (std::size_t t = 0;; ++t) {
    if (t >= kMaxEpisodeSteps) throw Error("episode did not terminate");
    const auto out = policy_forward(p, obs);
    const auto a = sample_action(out.mean, out.log_std, rng);
    ep.buffer.observations.insert(ep.buffer.observations.end(), obs.begin(), obs.end());
    ep.buffer.actions.push_back(a.raw);
    ep.buffer.log_probs.push_back(a.log_prob);
    ep.buffer.values.push_back(out.value);
    auto step = env.step(a.action);
    ep.buffer.rewards.push_back(step.reward);
    ep.buffer.dones.push_back(step.done);
    ep.ret += step.reward;
    if (step.done) break;
    obs = std::move(step.observation);
  }
  return ep;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t update, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(update), static_cast<std::uint32_t>(update >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

RolloutResult collect_rollouts(const std::vector<EpisodicEnv*>& envs, const PolicyParams& p,
                               std::uint64_t seed, std::uint64_t update) {
  if (envs.empty()) throw InvalidArgument("rollout needs at least one environment");
  const std::size_t n = envs.size();
  std::vector<Episode> episodes(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t e) {
    try {
      episodes[e] = run_episode(*envs[e], p, derive_seed(seed, update, 2 * e),
                                derive_seed(seed, update, 2 * e + 1));
    } catch (...) {
      errors[e] = std::current_exception();
    }
  };
  if (n == 1) {
    work(0);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t e = 0; e < n; ++e) workers.emplace_back(work, e);
    for (auto& w : workers) w.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  RolloutResult res;
  for (auto& ep : episodes) {
    res.buffer.append(ep.buffer);
    res.episode_returns.push_back(ep.ret);
    res.episode_lengths.push_back(ep.buffer.size());
  }
  return res;
}

std::vector<double> run_deterministic(EpisodicEnv& env, const PolicyParams& p,
                                      std::uint64_t seed) {
  std::vector<double> rewards;
  auto obs = env.reset(seed);
  for (std::size_t t = 0;; ++t) {
    if (t >= kMaxEpisodeSteps) throw Error("episode did not terminate");
    const auto out = policy_forward(p, obs);
    auto step = env.step(out.mean);
    rewards.push_back(step.reward);
    if (step.done) break;
    obs = std::move(step.observation);
  }
  return rewards;
}

Trainer::Trainer(PolicyParams params, PPOConfig cfg)
    : params_(std::move(params)),
      adam_(AdamState::zeros(static_cast<Eigen::Index>(params_.parameter_count()))),
      cfg_(cfg) {
  cfg_.validate();
}

Trainer::Trainer(PolicyParams params, AdamState adam, PPOConfig cfg, std::size_t updates_done)
    : params_(std::move(params)), adam_(std::move(adam)), cfg_(cfg), updates_(updates_done) {
  cfg_.validate();
}

UpdateReport Trainer::iterate(const std::vector<EpisodicEnv*>& envs) {
  auto res = collect_rollouts(envs, params_, cfg_.seed, updates_);
  compute_advantages(res.buffer, cfg_.gamma, cfg_.lambda);
  UpdateReport rep;
  rep.stats = ppo_update(params_, adam_, res.buffer, cfg_,
                         derive_seed(cfg_.seed, updates_, 0xFFFF'FFFF'FFFFull));
  ++updates_;
  rep.update = updates_;
  rep.episode_returns = std::move(res.episode_returns);
  rep.mean_return = std::accumulate(rep.episode_returns.begin(), rep.episode_returns.end(), 0.0) /
                    static_cast<double>(rep.episode_returns.size());
  return rep;
}

}  // namespace lpbf::ppo
