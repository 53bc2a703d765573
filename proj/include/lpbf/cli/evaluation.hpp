#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpbf/env/environment.hpp"
#include "lpbf/ppo/policy.hpp"

namespace lpbf::cli {

struct DepthStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

DepthStats depth_stats(std::span<const double> depths_um);

/// Fixed-width bins starting at 0 that cover every value.
struct Histogram {
  double bin_um = 0.0;
  std::vector<std::size_t> counts;
};

Histogram histogram(std::span<const double> values, double bin_um, double upper_um);

/// One episode over the scan path, either at a constant velocity or under a
/// policy's mean action.
struct RunResult {
  std::string name;
  std::optional<double> velocity;  // constant velocity, unset for the policy
  std::vector<env::StepRecord> log;
  DepthStats stats;
  double episode_return = 0.0;

  std::vector<double> depths() const;
};

/// Summary of the episode the environment has just run.
RunResult collect_run(std::string name, std::optional<double> velocity,
                      const env::Environment& env);

RunResult run_constant(env::Environment& env, double velocity);
RunResult run_policy(env::Environment& env, const ppo::PolicyParams& params, std::uint64_t seed);

/// Distance from `p` to the closest turnaround, infinity when there are none.
double turnaround_distance(const std::vector<Vec2>& turnarounds, Vec2 p);

/// Mean commanded velocity of control intervals whose midpoint lies within
/// `radius_um` of a turnaround, and of the remaining intervals.
struct VelocityContrast {
  double near_mean = 0.0;
  double far_mean = 0.0;
  std::size_t near_count = 0;
  std::size_t far_count = 0;
};

VelocityContrast velocity_contrast(const scanpath::ScanPath& path,
                                   const std::vector<env::StepRecord>& log, double radius_um);

/// CSV `step,x_um,y_um,v_mps,turnaround_dist_um,near_turnaround`, one row per
/// control interval, distances measured from the interval midpoint.
void write_velocity_trace_csv(const std::filesystem::path& file, const scanpath::ScanPath& path,
                              const std::vector<env::StepRecord>& log, double radius_um);

/// CSV `bin_lo_um,bin_hi_um,<run name>...` with shared bins for every run.
void write_histogram_csv(const std::filesystem::path& file, const std::vector<RunResult>& runs,
                         double bin_um);

/// CSV `run,velocity_mps,steps,mean_depth_um,std_depth_um,min_depth_um,max_depth_um,episode_return`.
void write_summary_csv(const std::filesystem::path& file, const std::vector<RunResult>& runs);

}  // namespace lpbf::cli
