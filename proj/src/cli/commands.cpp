#include "lpbf/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lpbf/ppo/checkpoint.hpp"
#include "lpbf/ppo/rollout.hpp"
#include "lpbf/thermal/field_io.hpp"

namespace lpbf::cli {

namespace fs = std::filesystem;

namespace {

void print_stats(std::ostream& log, const std::string& name, const DepthStats& s) {
  log << name << ": steps=" << s.count << " mean=" << s.mean << " std=" << s.std
      << " min=" << s.min << " max=" << s.max << " um\n";
}

std::string velocity_tag(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

/// Keeps the header and the first `rows` data rows of an existing curve.
std::vector<std::string> curve_prefix(const fs::path& file, std::size_t rows) {
  std::vector<std::string> lines;
  std::ifstream in(file);
  std::string line;
  if (!std::getline(in, line)) return lines;
  while (lines.size() < rows && std::getline(in, line)) lines.push_back(line);
  return lines;
}

void atomic_checkpoint(const fs::path& file, const ppo::Checkpoint& ck) {
  const auto tmp = fs::path(file.string() + ".tmp");
  ppo::save_checkpoint(tmp, ck);
  fs::rename(ppo::sidecar_path(tmp), ppo::sidecar_path(file));
  fs::rename(tmp, file);
}

}  // namespace

RunResult cmd_simulate(const RunConfig& cfg, double velocity, const fs::path& out,
                       std::ostream& log) {
  cfg.validate();
  if (!(velocity > 0.0)) throw ConfigError("simulate: velocity must be > 0");
  fs::create_directories(out);
  env::Environment env(cfg.env_config());
  env.reset(cfg.seed);

  auto times = cfg.simulate.snapshot_times_s;
  std::sort(times.begin(), times.end());
  std::size_t next = 0;
  int snap = 0;
  while (!env.done()) {
    env.step_velocity(velocity);
    while (next < times.size() && env.time_s() >= times[next]) {
      const auto stem = out / ("snapshot_" + std::to_string(snap++));
      thermal::write_snapshot(fs::path(stem.string() + ".msrl"), env.field());
      thermal::write_surface_csv(fs::path(stem.string() + "_surface.csv"), env.field());
      ++next;
    }
  }
  meltpool::write_trace_csv(out / "trace.csv", env.trace());
  env::write_episode_csv(out / "episode.csv", env.log());
  scanpath::write_path_csv(out / "path.csv", env.config().path);

  RunResult r = collect_run("v" + velocity_tag(velocity), velocity, env);
  write_summary_csv(out / "summary.csv", {r});
  print_stats(log, "constant " + velocity_tag(velocity) + " m/s", r.stats);
  return r;
}

double straight_track_depth(const RunConfig& cfg, double power, double velocity,
                            double length_um) {
  auto ec = cfg.env_config();
  ec.laser.power = power;
  const Vec2 centre{0.5 * (ec.grid.x_min() + ec.grid.x_max()),
                    0.5 * (ec.grid.y_min() + ec.grid.y_max())};
  ec.path = scanpath::ScanPath({scanpath::Segment::between({centre.x - 0.5 * length_um, centre.y},
                                                           {centre.x + 0.5 * length_um, centre.y})},
                               cfg.path.interval_um);
  env::Environment env(ec);
  while (!env.done()) env.step_velocity(velocity);
  return env.trace().back().depth_um;
}

Calibration cmd_calibrate(const RunConfig& cfg, double velocity, double target,
                          const fs::path& out, std::ostream& log) {
  cfg.validate();
  const auto& cs = cfg.calibrate;
  if (!(velocity > 0.0)) throw ConfigError("calibrate: velocity must be > 0");
  if (!(target >= 0.0)) throw ConfigError("calibrate: target depth must be >= 0");
  fs::create_directories(out);
  std::ofstream csv(out / "calibration.csv");
  csv << "evaluation,power_w,depth_um\n" << std::setprecision(12);

  Calibration cal;
  auto eval = [&](double p) {
    const double d = straight_track_depth(cfg, p, velocity, cs.track_length_um);
    ++cal.evaluations;
    csv << cal.evaluations << ',' << p << ',' << d << '\n';
    log << "  P=" << p << " W -> depth " << d << " um\n";
    return d;
  };

  if (target == 0.0) {
    cal.power = 0.0;
    cal.depth_um = 0.0;
  } else {
    const double d_hi = eval(cs.max_power);
    if (d_hi < target - cs.tolerance_um) {
      std::ostringstream msg;
      msg << "target depth " << target << " um is not reachable below " << cs.max_power
          << " W (depth there " << d_hi << " um)";
      throw NotBracketed(msg.str());
    }
    double lo = 0.0, hi = cs.max_power;
    cal.power = hi;
    cal.depth_um = d_hi;
    for (int it = 0; it < 80 && std::abs(cal.depth_um - target) >= cs.tolerance_um; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double d = eval(mid);
      cal.power = mid;
      cal.depth_um = d;
      (d < target ? lo : hi) = mid;
    }
    if (std::abs(cal.depth_um - target) >= cs.tolerance_um)
      throw NumericalError("power bisection did not reach the depth tolerance");
  }
  RunConfig calibrated = cfg;
  calibrated.laser.power = cal.power;
  calibrated.calibrate.velocity = velocity;
  calibrated.calibrate.target_depth_um = target;
  save_config(out / "calibrated.yaml", calibrated);
  log << "calibrated power " << std::setprecision(10) << cal.power << " W (depth "
      << cal.depth_um << " um at " << velocity << " m/s)\n";
  return cal;
}

TrainResult cmd_train(const RunConfig& cfg, const fs::path& out,
                      const std::optional<fs::path>& resume, std::ostream& log) {
  cfg.validate();
  fs::create_directories(out);
  save_config(out / "config.yaml", cfg);
  const auto pc = cfg.ppo_config();
  const auto ec = cfg.env_config();

  std::vector<std::unique_ptr<env::Environment>> envs;
  envs.push_back(std::make_unique<env::Environment>(ec));
  for (int i = 1; i < pc.n_envs; ++i)
    envs.push_back(std::make_unique<env::Environment>(ec, envs.front()->cache()));
  std::vector<EpisodicEnv*> ptrs;
  for (auto& e : envs) ptrs.push_back(e.get());
  const int obs = static_cast<int>(envs.front()->observation_size());

  std::optional<ppo::Trainer> trainer;
  std::vector<std::string> kept;
  const auto curve_file = out / "learning_curve.csv";
  if (resume) {
    auto ck = ppo::load_checkpoint(*resume, obs);
    if (ck.params.policy.sizes()[1] != pc.hidden)
      throw ppo::CheckpointMismatch("checkpoint hidden width differs from the config");
    auto adam = ck.adam ? *ck.adam
                        : ppo::AdamState::zeros(static_cast<Eigen::Index>(ck.params.parameter_count()));
    kept = curve_prefix(curve_file, ck.updates_done);
    if (kept.size() != ck.updates_done)
      log << "note: learning curve rows before update " << ck.updates_done << " are missing\n";
    trainer.emplace(std::move(ck.params), std::move(adam), pc, ck.updates_done);
    log << "resuming from update " << trainer->updates_done() << '\n';
  } else {
    auto params = ppo::PolicyParams::create(obs, pc.hidden);
    params.initialize(pc.seed, pc.init_log_std);
    trainer.emplace(std::move(params), pc);
  }

  std::ofstream curve(curve_file);
  if (!curve) throw Error("cannot write " + curve_file.string());
  curve << "update,mean_reward,depth_std\n";
  for (const auto& l : kept) curve << l << '\n';
  curve << std::setprecision(10);

  const auto ckpt_file = out / "checkpoint.bin";
  auto save = [&] {
    atomic_checkpoint(ckpt_file, {trainer->params(), trainer->adam(), trainer->updates_done(), pc});
  };
  while (trainer->updates_done() < static_cast<std::size_t>(pc.n_updates)) {
    const auto rep = trainer->iterate(ptrs);
    double depth_std = 0.0;
    for (const auto& e : envs) depth_std += depth_stats(e->trace().depths()).std;
    depth_std /= static_cast<double>(envs.size());
    curve << rep.update << ',' << rep.mean_return << ',' << depth_std << '\n' << std::flush;
    log << "update " << rep.update << " mean_reward=" << rep.mean_return
        << " depth_std=" << depth_std << " log_std=" << trainer->params().log_std << '\n';
    if (rep.update % static_cast<std::size_t>(cfg.train.checkpoint_every) == 0) save();
  }
  save();
  return {trainer->updates_done(), ckpt_file, curve_file};
}

EvaluationReport cmd_evaluate(const RunConfig& cfg, const fs::path& checkpoint, const fs::path& out,
                              std::ostream& log) {
  cfg.validate();
  const auto ec = cfg.env_config();
  env::Environment env(ec);
  const auto ck = ppo::load_checkpoint(checkpoint, static_cast<int>(env.observation_size()));
  fs::create_directories(out);

  EvaluationReport rep;
  rep.policy = run_policy(env, ck.params, cfg.seed);
  env::write_episode_csv(out / "policy_episode.csv", rep.policy.log);
  write_velocity_trace_csv(out / "velocity_trace.csv", ec.path, rep.policy.log,
                           cfg.evaluate.turnaround_radius_um);
  rep.velocity = velocity_contrast(ec.path, rep.policy.log, cfg.evaluate.turnaround_radius_um);
  print_stats(log, "policy", rep.policy.stats);
  log << "policy velocity near turnarounds " << rep.velocity.near_mean << " m/s, elsewhere "
      << rep.velocity.far_mean << " m/s\n";

  for (double v : cfg.evaluate.baseline_velocities) {
    auto r = run_constant(env, v);
    env::write_episode_csv(out / ("baseline_" + velocity_tag(v) + ".csv"), r.log);
    print_stats(log, "constant " + velocity_tag(v) + " m/s", r.stats);
    rep.baselines.push_back(std::move(r));
  }
  std::vector<RunResult> all{rep.policy};
  all.insert(all.end(), rep.baselines.begin(), rep.baselines.end());
  write_histogram_csv(out / "depth_histogram.csv", all, cfg.evaluate.histogram_bin_um);
  write_summary_csv(out / "summary.csv", all);
  return rep;
}

}  // namespace lpbf::cli
