#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <unistd.h>

#include "lpbf/env/environment.hpp"
#include "lpbf/env/reward.hpp"
#include "lpbf/ppo/checkpoint.hpp"
#include "lpbf/ppo/gae.hpp"
#include "lpbf/ppo/rollout.hpp"

using namespace lpbf;
using namespace lpbf::ppo;

namespace {

/// One-step task: reward -(a - target)^2 regardless of the observation.
class Bandit : public EpisodicEnv {
 public:
  explicit Bandit(double target = 0.3) : target_(target) {}
  std::size_t observation_size() const override { return 4; }
  std::vector<double> reset(std::uint64_t seed) override {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    obs_.resize(4);
    for (auto& o : obs_) o = u(rng);
    return obs_;
  }
  StepOutcome step(double action) override {
    return {obs_, -(action - target_) * (action - target_), true};
  }

 private:
  double target_;
  std::vector<double> obs_;
};

/// Fixed-length task whose reward depends on the observed phase.
class Chain : public EpisodicEnv {
 public:
  std::size_t observation_size() const override { return 2; }
  std::vector<double> reset(std::uint64_t) override {
    t_ = 0;
    return obs();
  }
  StepOutcome step(double action) override {
    const double want = t_ % 2 == 0 ? 0.5 : -0.5;
    ++t_;
    return {obs(), -(action - want) * (action - want), t_ >= 6};
  }

 private:
  std::vector<double> obs() const { return {t_ % 2 == 0 ? 1.0 : -1.0, t_ / 6.0}; }
  int t_ = 0;
};

std::vector<EpisodicEnv*> pointers(std::vector<Bandit>& envs) {
  std::vector<EpisodicEnv*> out;
  for (auto& e : envs) out.push_back(&e);
  return out;
}

RolloutBuffer random_buffer(const PolicyParams& p, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  RolloutBuffer b;
  b.obs_size = p.policy.input_size();
  for (int i = 0; i < n; ++i) {
    std::vector<double> o(static_cast<std::size_t>(b.obs_size));
    for (auto& x : o) x = g(rng);
    const auto out = policy_forward(p, o);
    const double a = out.mean + std::exp(out.log_std) * g(rng);
    b.observations.insert(b.observations.end(), o.begin(), o.end());
    b.actions.push_back(a);
    // stale log-probs put some ratios inside and some outside the clip band
    b.log_probs.push_back(gaussian_log_prob(a, out.mean, out.log_std) + 0.3 * g(rng));
    b.rewards.push_back(g(rng));
    b.values.push_back(out.value);
    b.dones.push_back(i == n - 1);
    b.advantages.push_back(g(rng));
    b.returns.push_back(g(rng));
  }
  return b;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("networks") {
  TEST_CASE("zero weights give a zero mean and zero value") {
    auto p = PolicyParams::create(5, 8);
    p.unflatten(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.parameter_count())));
    const auto out = policy_forward(p, std::vector<double>{1, -2, 3, 0.5, 7});
    CHECK(out.mean == 0.0);
    CHECK(out.value == 0.0);
    CHECK(out.log_std == 0.0);
  }

  TEST_CASE("parameter count and flatten round trip") {
    auto p = PolicyParams::create(6, 10);
    p.initialize(3, -1.0);
    CHECK(p.parameter_count() == 2 * (6 * 10 + 10 + 10 * 10 + 10 + 10 + 1) + 1);
    auto q = PolicyParams::create(6, 10);
    q.unflatten(p.flatten());
    CHECK((q.flatten() - p.flatten()).norm() == 0.0);
  }

  TEST_CASE("initial policy mean is small and log std is set") {
    auto p = PolicyParams::create(576, 64);
    p.initialize(11, -1.0);
    CHECK(p.log_std == doctest::Approx(-1.0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> o(576);
    for (auto& x : o) x = g(rng);
    CHECK(std::abs(policy_forward(p, o).mean) < 0.1);
  }

  TEST_CASE("log std is clamped to its band") {
    auto p = PolicyParams::create(2, 4);
    p.initialize(0, 5.0);
    CHECK(p.log_std == doctest::Approx(std::log(2.0)));
    p.initialize(0, -50.0);
    CHECK(p.log_std == doctest::Approx(std::log(1e-3)));
  }

  TEST_CASE("non-finite observations are rejected") {
    auto p = PolicyParams::create(2, 4);
    p.initialize(0, -1.0);
    CHECK_THROWS_AS(policy_forward(p, std::vector<double>{NAN, 0.0}), NonFiniteActivation);
    CHECK_THROWS_AS(policy_forward(p, std::vector<double>{0.0}), InvalidArgument);
  }

  TEST_CASE("mlp backward matches finite differences") {
    Mlp m({3, 5, 4, 2}, Activation::Tanh, Activation::Identity);
    std::mt19937_64 rng(2);
    m.init_glorot(rng, 1.0);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 6);
    Eigen::MatrixXd w = Eigen::MatrixXd::Random(2, 6);
    auto loss = [&](const Mlp& net) { return (net.forward(x).array() * w.array()).sum(); };
    Mlp::Tape tape;
    m.forward(x, &tape);
    auto grads = m.zero_like();
    m.backward(tape, w, grads);
    std::vector<double> g(m.parameter_count()), theta(m.parameter_count());
    write_layers(grads, g.data());
    m.write_to(theta.data());
    const double h = 1e-6;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      Mlp a = m, b = m;
      a.read_from(tp.data());
      b.read_from(tm.data());
      CHECK(g[i] == doctest::Approx((loss(a) - loss(b)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_SUITE("gaussian policy") {
  TEST_CASE("log density at the mean") {
    CHECK(gaussian_log_prob(0.2, 0.2, std::log(0.5)) ==
          doctest::Approx(-std::log(0.5) - 0.5 * std::log(2 * M_PI)));
    CHECK(gaussian_log_prob(1.2, 0.2, 0.0) == doctest::Approx(-0.5 - 0.5 * std::log(2 * M_PI)));
  }

  TEST_CASE("entropy of a unit Gaussian") {
    CHECK(gaussian_entropy(0.0) == doctest::Approx(0.5 * std::log(2 * M_PI * M_E)));
  }

  TEST_CASE("sampled actions have the configured spread and are clamped") {
    std::mt19937_64 rng(7);
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    bool clamped = true;
    for (int i = 0; i < n; ++i) {
      const auto a = sample_action(0.1, std::log(0.3), rng);
      s += a.raw;
      s2 += a.raw * a.raw;
      clamped = clamped && a.action >= -1.0 && a.action <= 1.0 &&
                a.action == std::clamp(a.raw, -1.0, 1.0);
      if (i < 10) CHECK(a.log_prob == doctest::Approx(gaussian_log_prob(a.raw, 0.1, std::log(0.3))));
    }
    const double mean = s / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    CHECK(mean == doctest::Approx(0.1).epsilon(0.02));
    CHECK(sd == doctest::Approx(0.3).epsilon(0.02));
    CHECK(clamped);
  }
}

TEST_SUITE("advantages") {
  TEST_CASE("single step episode") {
    std::vector<double> r{1.0}, v{0.4};
    auto e = gae(r, v, {true}, 0.99, 0.95);
    CHECK(e.advantages[0] == doctest::Approx(0.6));
    CHECK(e.returns[0] == doctest::Approx(1.0));
  }

  TEST_CASE("matches the explicit double sum") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 13;
    std::vector<double> r(n), v(n);
    std::vector<bool> d(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = g(rng);
      v[i] = g(rng);
    }
    d[4] = true;
    d[n - 1] = true;
    const double gamma = 0.9, lambda = 0.8;
    auto e = gae(r, v, d, gamma, lambda);
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t end = t;
      while (!d[end]) ++end;
      double a = 0.0;
      for (std::size_t l = t; l <= end; ++l) {
        const double next = l == end ? 0.0 : v[l + 1];
        const double delta = r[l] + gamma * next - v[l];
        a += std::pow(gamma * lambda, static_cast<double>(l - t)) * delta;
      }
      CHECK(e.advantages[t] == doctest::Approx(a).epsilon(1e-12));
      CHECK(e.returns[t] == doctest::Approx(a + v[t]).epsilon(1e-12));
    }
  }

  TEST_CASE("lambda one gives discounted returns") {
    std::vector<double> r{1, 2, 3}, v{0.5, -1, 2};
    auto e = gae(r, v, {false, false, true}, 0.5, 1.0);
    CHECK(e.returns[0] == doctest::Approx(1 + 0.5 * 2 + 0.25 * 3));
    CHECK(e.returns[1] == doctest::Approx(2 + 0.5 * 3));
    CHECK(e.returns[2] == doctest::Approx(3));
  }

  TEST_CASE("unfinished trajectory bootstraps") {
    std::vector<double> r{0.0}, v{0.0};
    auto e = gae(r, v, {false}, 0.9, 0.95, 2.0);
    CHECK(e.advantages[0] == doctest::Approx(1.8));
  }

  TEST_CASE("length mismatch") {
    std::vector<double> r{1, 2}, v{1};
    CHECK_THROWS_AS(gae(r, v, {true, true}, 0.9, 0.9), LengthMismatch);
  }
}

TEST_SUITE("surrogate") {
  TEST_CASE("clipped objective arithmetic") {
    CHECK(clipped_objective(1.5, 1.0, 0.2) == doctest::Approx(1.2));
    CHECK(clipped_objective(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
    CHECK(clipped_objective(0.5, 1.0, 0.2) == doctest::Approx(0.5));
    CHECK(clipped_objective(1.5, -1.0, 0.2) == doctest::Approx(-1.5));
    CHECK(clipped_objective(1.1, 2.0, 0.2) == doctest::Approx(2.2));
  }

  TEST_CASE("loss gradient matches finite differences") {
    auto p = PolicyParams::create(3, 6);
    p.initialize(9, -0.5);
    // nudge the policy head so the mean path is exercised
    auto flat = p.flatten();
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.3);
    for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) += g(rng);
    p.unflatten(flat);
    const auto buf = random_buffer(p, 6, 21);
    std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5};
    PPOConfig cfg;
    cfg.entropy_coef = 0.01;
    Eigen::VectorXd grad;
    const auto base = ppo_loss(p, buf, buf.advantages, idx, cfg, &grad);
    CHECK(std::isfinite(base.total));
    const double h = 1e-6;
    int checked = 0;
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
      auto a = p, b = p;
      Eigen::VectorXd fp = flat, fm = flat;
      fp(i) += h;
      fm(i) -= h;
      a.unflatten(fp);
      b.unflatten(fm);
      const double fd = (ppo_loss(a, buf, buf.advantages, idx, cfg).total -
                         ppo_loss(b, buf, buf.advantages, idx, cfg).total) /
                        (2 * h);
      CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-5).scale(1e-4));
      ++checked;
    }
    CHECK(checked == static_cast<int>(p.parameter_count()));
  }

  TEST_CASE("loss at the behaviour policy") {
    auto p = PolicyParams::create(2, 4);
    p.initialize(1, -1.0);
    RolloutBuffer b;
    b.obs_size = 2;
    b.observations = {0.5, -0.5, 1.0, 0.0};
    for (int i = 0; i < 2; ++i) {
      const auto out = policy_forward(p, b.observation(i));
      b.actions.push_back(out.mean + 0.1);
      b.log_probs.push_back(gaussian_log_prob(out.mean + 0.1, out.mean, out.log_std));
      b.values.push_back(out.value);
      b.rewards.push_back(0.0);
      b.dones.push_back(true);
      b.returns.push_back(out.value + 1.0);
    }
    std::vector<double> adv{1.0, 3.0};
    std::vector<std::size_t> idx{0, 1};
    PPOConfig cfg;
    const auto l = ppo_loss(p, b, adv, idx, cfg);
    CHECK(l.policy == doctest::Approx(-2.0));
    CHECK(l.value == doctest::Approx(1.0));
    CHECK(l.approx_kl == doctest::Approx(0.0).scale(1e-12));
    CHECK(l.clip_fraction == 0.0);
    CHECK(l.total == doctest::Approx(-2.0 + 0.5));
  }

  TEST_CASE("update raises the probability of advantaged actions") {
    auto p = PolicyParams::create(2, 8);
    p.initialize(2, -1.0);
    RolloutBuffer b;
    b.obs_size = 2;
    for (int i = 0; i < 32; ++i) {
      b.observations.insert(b.observations.end(), {0.3, -0.2});
      const double a = i % 2 ? 0.4 : -0.4;
      const auto out = policy_forward(p, b.observation(i));
      b.actions.push_back(a);
      b.log_probs.push_back(gaussian_log_prob(a, out.mean, out.log_std));
      b.values.push_back(out.value);
      b.rewards.push_back(i % 2 ? 1.0 : -1.0);
      b.dones.push_back(true);
    }
    compute_advantages(b, 0.99, 0.95);
    PPOConfig cfg;
    cfg.minibatch = 8;
    auto adam = AdamState::zeros(static_cast<Eigen::Index>(p.parameter_count()));
    const double before = policy_forward(p, b.observation(0)).mean;
    const auto stats = ppo_update(p, adam, b, cfg, 1);
    CHECK(stats.steps == 40);
    CHECK(adam.step == 40);
    CHECK(policy_forward(p, b.observation(0)).mean > before + 0.01);
  }

  TEST_CASE("non-finite gradients leave parameters untouched") {
    auto p = PolicyParams::create(2, 4);
    p.initialize(1, -1.0);
    auto b = random_buffer(p, 4, 3);
    b.returns[2] = std::numeric_limits<double>::infinity();
    auto adam = AdamState::zeros(static_cast<Eigen::Index>(p.parameter_count()));
    const auto before = p.flatten();
    CHECK_THROWS_AS(ppo_update(p, adam, b, PPOConfig{}, 0), NonFiniteGradient);
    CHECK((p.flatten() - before).norm() == 0.0);
    CHECK(adam.step == 0);
  }

  TEST_CASE("config validation") {
    PPOConfig c;
    CHECK_NOTHROW(c.validate());
    c.clip = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.minibatch = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.gamma = 1.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
  }
}

TEST_SUITE("adam") {
  TEST_CASE("first step moves each coordinate by the learning rate") {
    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    Eigen::VectorXd g(3);
    g << 4.0, -0.01, 0.0;
    auto st = AdamState::zeros(3);
    adam_step(x, g, st, 0.1);
    CHECK(x(0) == doctest::Approx(0.9));
    CHECK(x(1) == doctest::Approx(-1.9).epsilon(1e-5));
    CHECK(x(2) == doctest::Approx(0.5));
  }

  TEST_CASE("minimises a quadratic") {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 3.0);
    auto st = AdamState::zeros(4);
    for (int i = 0; i < 3000; ++i) adam_step(x, 2.0 * x, st, 0.01);
    CHECK(x.norm() < 1e-2);
  }
}

TEST_SUITE("rollouts and training") {
  TEST_CASE("derived seeds differ per stream and update") {
    CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
  }

  TEST_CASE("buffer holds every step of every env in env order") {
    std::vector<Chain> chains(3);
    std::vector<EpisodicEnv*> envs;
    for (auto& c : chains) envs.push_back(&c);
    auto p = PolicyParams::create(2, 8);
    p.initialize(0, -1.0);
    auto res = collect_rollouts(envs, p, 5, 0);
    CHECK(res.buffer.size() == 18);
    CHECK(res.episode_lengths == std::vector<std::size_t>{6, 6, 6});
    for (std::size_t e = 0; e < 3; ++e) {
      double sum = 0.0;
      for (std::size_t t = 0; t < 6; ++t) sum += res.buffer.rewards[e * 6 + t];
      CHECK(res.episode_returns[e] == sum);
      CHECK(res.buffer.dones[e * 6 + 5]);
      CHECK_FALSE(res.buffer.dones[e * 6 + 4]);
    }
    CHECK(res.buffer.observations.size() == 18 * 2);
  }

  TEST_CASE("rollouts are reproducible and threads do not interfere") {
    std::vector<Bandit> a(8), b(8);
    auto p = PolicyParams::create(4, 8);
    p.initialize(3, -0.5);
    auto ra = collect_rollouts(pointers(a), p, 42, 7);
    auto rb = collect_rollouts(pointers(b), p, 42, 7);
    CHECK(ra.buffer.actions == rb.buffer.actions);
    CHECK(ra.buffer.observations == rb.buffer.observations);
    auto rc = collect_rollouts(pointers(b), p, 42, 8);
    CHECK(ra.buffer.actions != rc.buffer.actions);
  }

  TEST_CASE("training is deterministic for a fixed seed") {
    PPOConfig cfg;
    cfg.n_envs = 8;
    cfg.seed = 17;
    cfg.minibatch = 4;
    auto p = PolicyParams::create(4, 8);
    p.initialize(cfg.seed, cfg.init_log_std);
    Trainer t1(p, cfg), t2(p, cfg);
    std::vector<Bandit> a(8), b(8);
    for (int i = 0; i < 5; ++i) {
      auto r1 = t1.iterate(pointers(a));
      auto r2 = t2.iterate(pointers(b));
      CHECK(r1.mean_return == r2.mean_return);
    }
    CHECK((t1.params().flatten() - t2.params().flatten()).norm() == 0.0);
    CHECK(t1.updates_done() == 5);
  }

  TEST_CASE("bandit policy converges to the optimal action") {
    PPOConfig cfg;
    cfg.n_envs = 64;
    cfg.learning_rate = 1e-3;
    cfg.seed = 1;
    cfg.init_log_std = -0.5;
    auto p = PolicyParams::create(4, 16);
    p.initialize(cfg.seed, cfg.init_log_std);
    Trainer t(p, cfg);
    std::vector<Bandit> envs(64);
    for (int i = 0; i < 500; ++i) t.iterate(pointers(envs));
    Bandit probe;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto out = policy_forward(t.params(), probe.reset(1000 + s));
      CHECK(std::abs(out.mean - 0.3) < 0.05);
    }
  }

  TEST_CASE("short training improves the deterministic return on every seed") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      PPOConfig cfg;
      cfg.n_envs = 4;
      cfg.minibatch = 12;
      cfg.learning_rate = 1e-3;
      cfg.seed = seed;
      auto p = PolicyParams::create(2, 16);
      p.initialize(seed, cfg.init_log_std);
      Chain probe;
      const double before = mean_of(run_deterministic(probe, p, 0));
      Trainer t(p, cfg);
      std::vector<Chain> chains(4);
      std::vector<EpisodicEnv*> envs;
      for (auto& c : chains) envs.push_back(&c);
      for (int i = 0; i < 60; ++i) t.iterate(envs);
      const double after = mean_of(run_deterministic(probe, t.params(), 0));
      CHECK(after > before);
    }
  }
}

TEST_SUITE("laser environment") {
  env::EnvConfig short_config() {
    env::EnvConfig c;
    c.laser.power = 1200.0;
    c.grid.nx = 30;
    c.grid.ny = 20;
    c.grid.nz = 16;
    c.grid.origin_um = {0.0, 0.0};
    c.path = scanpath::ScanPath({scanpath::Segment::between({100, 150}, {450, 150}),
                                 scanpath::Segment::between({450, 150}, {450, 250})},
                                50.0);
    return c;
  }

  TEST_CASE("rollout buffer spans every control interval of every env") {
    env::Environment e0(short_config()), e1(short_config(), e0.cache());
    std::vector<EpisodicEnv*> envs{&e0, &e1};
    auto p = PolicyParams::create(static_cast<int>(e0.observation_size()), 16);
    p.initialize(0, -1.0);
    auto res = collect_rollouts(envs, p, 3, 0);
    CHECK(res.buffer.size() == 2 * e0.episode_length());
    CHECK(res.buffer.obs_size == 576);
  }

  TEST_CASE("deterministic rewards sum to the episode return") {
    env::Environment e(short_config());
    auto p = PolicyParams::create(static_cast<int>(e.observation_size()), 16);
    p.initialize(1, -1.0);
    const auto rewards = run_deterministic(e, p, 0);
    const double sum = std::accumulate(rewards.begin(), rewards.end(), 0.0);
    const auto depths = e.trace().depths();
    CHECK(sum == env::episode_return(depths, e.config().reward));
  }
}

TEST_SUITE("checkpoint") {
  namespace fs = std::filesystem;

  struct TempDir {
    fs::path path = fs::temp_directory_path() / ("lpbf_ckpt_" + std::to_string(::getpid()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
  };

  Checkpoint sample() {
    Checkpoint c;
    c.params = PolicyParams::create(5, 7);
    c.params.initialize(4, -0.7);
    c.adam = AdamState::zeros(static_cast<Eigen::Index>(c.params.parameter_count()));
    c.adam->m.setRandom();
    c.adam->v.setRandom();
    c.adam->step = 123;
    c.updates_done = 9;
    c.config.seed = 77;
    c.config.hidden = 7;
    c.config.optimizer = Optimizer::Sgd;
    return c;
  }

  TEST_CASE("round trip restores weights, optimizer state and config") {
    TempDir d;
    const auto c = sample();
    save_checkpoint(d.path / "p.bin", c);
    CHECK(fs::exists(d.path / "p.bin.json"));
    const auto r = load_checkpoint(d.path / "p.bin", 5);
    CHECK((r.params.flatten() - c.params.flatten()).norm() == 0.0);
    REQUIRE(r.adam.has_value());
    CHECK(r.adam->step == 123);
    CHECK((r.adam->m - c.adam->m).norm() == 0.0);
    CHECK((r.adam->v - c.adam->v).norm() == 0.0);
    CHECK(r.updates_done == 9);
    CHECK(r.config == c.config);
    std::vector<double> o{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(policy_forward(r.params, o).mean == policy_forward(c.params, o).mean);
  }

  TEST_CASE("weights-only checkpoints load without optimizer state") {
    TempDir d;
    auto c = sample();
    c.adam.reset();
    save_checkpoint(d.path / "w.bin", c);
    CHECK_FALSE(load_checkpoint(d.path / "w.bin").adam.has_value());
  }

  TEST_CASE("mismatched or damaged checkpoints are rejected") {
    TempDir d;
    save_checkpoint(d.path / "p.bin", sample());
    CHECK_THROWS_AS(load_checkpoint(d.path / "p.bin", 576), CheckpointMismatch);
    {
      std::ofstream f(d.path / "junk.bin", std::ios::binary);
      f << "not a checkpoint";
    }
    CHECK_THROWS_AS(load_checkpoint(d.path / "junk.bin"), CheckpointMismatch);
    fs::copy_file(d.path / "p.bin", d.path / "cut.bin");
    fs::resize_file(d.path / "cut.bin", fs::file_size(d.path / "p.bin") - 8);
    CHECK_THROWS_AS(load_checkpoint(d.path / "cut.bin"), CheckpointMismatch);
    CHECK_THROWS_AS(load_checkpoint(d.path / "missing.bin"), Error);
  }
}
