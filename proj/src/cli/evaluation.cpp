#include "lpbf/cli/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "lpbf/ppo/rollout.hpp"

namespace lpbf::cli {

namespace {

std::ofstream open_csv(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << std::setprecision(10);
  return out;
}

}  // namespace

RunResult collect_run(std::string name, std::optional<double> velocity,
                      const env::Environment& env) {
  RunResult r;
  r.name = std::move(name);
  r.velocity = velocity;
  r.log = env.log();
  const auto d = r.depths();
  r.stats = depth_stats(d);
  for (const auto& s : r.log) r.episode_return += s.reward;
  return r;
}

DepthStats depth_stats(std::span<const double> d) {
  DepthStats s;
  s.count = d.size();
  if (d.empty()) return s;
  s.mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  double ss = 0.0;
  for (double x : d) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(d.size()));
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

Histogram histogram(std::span<const double> values, double bin_um, double upper_um) {
  if (!(bin_um > 0.0)) throw InvalidArgument("histogram bin must be > 0");
  Histogram h;
  h.bin_um = bin_um;
  double top = upper_um;
  for (double v : values) top = std::max(top, v);
  const auto bins = static_cast<std::size_t>(std::floor(top / bin_um)) + 1;
  h.counts.assign(bins, 0);
  for (double v : values) {
    const auto b = static_cast<std::size_t>(std::floor(std::max(v, 0.0) / bin_um));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

std::vector<double> RunResult::depths() const {
  std::vector<double> d;
  d.reserve(log.size());
  for (const auto& s : log) d.push_back(s.depth_um);
  return d;
}

RunResult run_constant(env::Environment& env, double velocity) {
  env.reset(0);
  while (!env.done()) env.step_velocity(velocity);
  std::ostringstream name;
  name << "v" << velocity;
  return collect_run(name.str(), velocity, env);
}

RunResult run_policy(env::Environment& env, const ppo::PolicyParams& params, std::uint64_t seed) {
  ppo::run_deterministic(env, params, seed);
  return collect_run("policy", std::nullopt, env);
}

double turnaround_distance(const std::vector<Vec2>& turnarounds, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : turnarounds) best = std::min(best, distance(t, p));
  return best;
}

VelocityContrast velocity_contrast(const scanpath::ScanPath& path,
                                   const std::vector<env::StepRecord>& log, double radius_um) {
  const auto turns = path.turnarounds();
  const auto& ctl = path.controls();
  if (log.size() > ctl.size()) throw InvalidArgument("log is longer than the scan path");
  VelocityContrast c;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Vec2 mid = 0.5 * (ctl[i].start + ctl[i].end);
    if (turnaround_distance(turns, mid) <= radius_um) {
      c.near_mean += log[i].velocity;
      ++c.near_count;
    } else {
      c.far_mean += log[i].velocity;
      ++c.far_count;
    }
  }
  if (c.near_count) c.near_mean /= static_cast<double>(c.near_count);
  if (c.far_count) c.far_mean /= static_cast<double>(c.far_count);
  return c;
}

void write_velocity_trace_csv(const std::filesystem::path& file, const scanpath::ScanPath& path,
                              const std::vector<env::StepRecord>& log, double radius_um) {
  const auto turns = path.turnarounds();
  const auto& ctl = path.controls();
  auto out = open_csv(file);
  out << "step,x_um,y_um,v_mps,turnaround_dist_um,near_turnaround\n";
  for (std::size_t i = 0; i < log.size() && i < ctl.size(); ++i) {
    const double d = turnaround_distance(turns, 0.5 * (ctl[i].start + ctl[i].end));
    out << log[i].step << ',' << log[i].laser_um.x << ',' << log[i].laser_um.y << ','
        << log[i].velocity << ',' << d << ',' << (d <= radius_um ? 1 : 0) << '\n';
  }
}

void write_histogram_csv(const std::filesystem::path& file, const std::vector<RunResult>& runs,
                         double bin_um) {
  double top = 0.0;
  for (const auto& r : runs) top = std::max(top, r.stats.max);
  std::vector<Histogram> hs;
  for (const auto& r : runs) hs.push_back(histogram(r.depths(), bin_um, top));
  auto out = open_csv(file);
  out << "bin_lo_um,bin_hi_um";
  for (const auto& r : runs) out << ',' << r.name;
  out << '\n';
  const std::size_t bins = hs.empty() ? 0 : hs.front().counts.size();
  for (std::size_t b = 0; b < bins; ++b) {
    out << b * bin_um << ',' << (b + 1) * bin_um;
    for (const auto& h : hs) out << ',' << h.counts[b];
    out << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& file, const std::vector<RunResult>& runs) {
  auto out = open_csv(file);
  out << "run,velocity_mps,steps,mean_depth_um,std_depth_um,min_depth_um,max_depth_um,"
         "episode_return\n";
  for (const auto& r : runs) {
    out << r.name << ',';
    if (r.velocity) out << *r.velocity;
    out << ',' << r.stats.count << ',' << r.stats.mean << ',' << r.stats.std << ',' << r.stats.min
        << ',' << r.stats.max << ',' << r.episode_return << '\n';
  }
}

}  // namespace lpbf::cli
