#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include "lpbf/cli/commands.hpp"
#include "lpbf/ppo/checkpoint.hpp"
#include "lpbf/thermal/field_io.hpp"

using namespace lpbf;
using namespace lpbf::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("lpbf_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

/// Two-row hatch on a small grid; a few seconds per episode at most.
RunConfig small_config() {
  RunConfig c;
  c.grid.nx = 24;
  c.grid.ny = 16;
  c.grid.nz = 16;
  c.grid.origin_um = {-40.0, -40.0};
  c.path.length_um = 400.0;
  c.path.hatch_um = 100.0;
  c.path.rows = 2;
  c.ppo.n_envs = 1;
  c.ppo.n_updates = 2;
  c.ppo.hidden = 8;
  c.ppo.epochs = 2;
  c.ppo.minibatch = 8;
  c.train.checkpoint_every = 1;
  c.calibrate.track_length_um = 300.0;
  return c;
}

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(LPBFCTL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults round trip through text") {
    const RunConfig c;
    CHECK(parse_config(emit_config(c)) == c);
  }

  TEST_CASE("non-default values round trip exactly") {
    RunConfig c;
    c.seed = 12345678901234ull;
    c.output_dir = "out/dir";
    c.material.density = 7900.123456789;
    c.laser.power = 1093.7512345678901;
    c.grid.origin_um = {-7.5, 3.25};
    c.boundary[thermal::Face::Bottom] = thermal::FaceCondition::fixed(300.0);
    c.boundary[thermal::Face::XMin] = thermal::FaceCondition::fixed(0.1 + 0.2);
    c.path.kind = PathConfig::Kind::Triangles;
    c.path.shrink = 0.7;
    c.reward.range_normalizer_um = 40.0;
    c.ppo.optimizer = ppo::Optimizer::Sgd;
    c.ppo.learning_rate = 1e-5;
    c.simulate.snapshot_times_s = {1e-4, 2.5e-3};
    c.evaluate.baseline_velocities = {0.3, 0.6, 0.9, 1.2, 1.5, 1.8};
    const auto back = parse_config(emit_config(c));
    CHECK(back == c);
    CHECK(emit_config(back) == emit_config(c));
  }

  TEST_CASE("partial documents keep the defaults") {
    const auto c = parse_config("laser:\n  power: 900\nppo:\n  n_updates: 7\n");
    CHECK(c.laser.power == 900.0);
    CHECK(c.ppo.n_updates == 7);
    CHECK(c.material == RunConfig{}.material);
  }

  TEST_CASE("unknown keys are reported with their line") {
    const auto msg = error_of("seed: 1\nlaser:\n  power: 100\n  pwr: 3\n");
    CHECK(msg.find("cfg.yaml:4") != std::string::npos);
    CHECK(msg.find("laser.pwr") != std::string::npos);
    CHECK(error_of("sead: 1\n").find("cfg.yaml:1") != std::string::npos);
    CHECK(error_of("path:\n  cross_hatch:\n    rows: 3\n    hatch: 5\n").find("cfg.yaml:4") !=
          std::string::npos);
  }

  TEST_CASE("bad values are reported with their line") {
    CHECK(error_of("grid:\n  nx: abc\n").find("cfg.yaml:2") != std::string::npos);
    CHECK(error_of("ppo:\n  optimizer: rmsprop\n").find("optimizer") != std::string::npos);
    CHECK(error_of("path:\n  kind: spiral\n").find("cfg.yaml:2") != std::string::npos);
    CHECK(error_of("velocity:\n  v_min: 3\n  v_max: 2\n").find("cfg.yaml:2") != std::string::npos);
    CHECK(error_of("laser: [1, 2]\n").find("cfg.yaml:1") != std::string::npos);
    CHECK(error_of("a: [\n").find("cfg.yaml") != std::string::npos);
  }

  TEST_CASE("cross-section problems are config errors") {
    CHECK_FALSE(error_of("grid:\n  nx: 10\n").empty());  // path leaves the grid
    CHECK_FALSE(error_of("evaluate:\n  baseline_velocities: [1, 2]\n").empty());
  }
}

TEST_SUITE("simulate") {
  TEST_CASE("zero power gives zero depth everywhere") {
    TempDir d("p0");
    auto c = small_config();
    c.laser.power = 0.0;
    std::ostringstream log;
    const auto r = cmd_simulate(c, 1.0, d.path, log);
    CHECK(r.log.size() == c.path.build().controls().size());
    for (const auto& s : r.log) CHECK(s.depth_um == 0.0);
    CHECK(r.stats.max == 0.0);
  }

  TEST_CASE("writes traces, snapshots and a summary") {
    TempDir d("sim");
    auto c = small_config();
    c.simulate.snapshot_times_s = {2e-4, 6e-4, 1.0};
    std::ostringstream log;
    const auto r = cmd_simulate(c, 1.0, d.path, log);
    const auto steps = r.log.size();
    CHECK(line_count(d.path / "trace.csv") == steps + 1);
    CHECK(line_count(d.path / "episode.csv") == steps + 1);
    CHECK(slurp(d.path / "trace.csv").rfind("t_s,x_um,y_um,depth_um,peak_K\n", 0) == 0);
    CHECK(fs::exists(d.path / "snapshot_0.msrl"));
    CHECK(fs::exists(d.path / "snapshot_1_surface.csv"));
    CHECK_FALSE(fs::exists(d.path / "snapshot_2.msrl"));  // after the run ends
    CHECK(line_count(d.path / "summary.csv") == 2);
    CHECK(r.stats.max > 0.0);
    CHECK(log.str().find("mean=") != std::string::npos);
    const auto snap = thermal::read_snapshot(d.path / "snapshot_0.msrl");
    CHECK(snap.grid().nx == c.grid.nx);
    CHECK(snap.max() > c.material.melt_temp);
  }

  TEST_CASE("repeated runs are byte identical") {
    TempDir a("da"), b("db");
    auto c = small_config();
    std::ostringstream log;
    cmd_simulate(c, 0.8, a.path, log);
    cmd_simulate(c, 0.8, b.path, log);
    for (const char* f : {"trace.csv", "episode.csv", "path.csv", "summary.csv"})
      CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
}

TEST_SUITE("calibrate") {
  TEST_CASE("zero target needs zero power") {
    TempDir d("c0");
    std::ostringstream log;
    CHECK(cmd_calibrate(small_config(), 1.0, 0.0, d.path, log).power == 0.0);
  }

  TEST_CASE("calibrated power reproduces the target and grows with it") {
    TempDir d("c1");
    std::ostringstream log;
    const auto c = small_config();
    const auto p55 = cmd_calibrate(c, 1.0, 55.0, d.path, log);
    CHECK(std::abs(p55.depth_um - 55.0) < 0.5);
    CHECK(std::abs(straight_track_depth(c, p55.power, 1.0, c.calibrate.track_length_um) - 55.0) <
          0.5);
    const auto emitted = load_config(d.path / "calibrated.yaml");
    CHECK(emitted.laser.power == p55.power);
    const auto p65 = cmd_calibrate(c, 1.0, 65.0, d.path, log);
    CHECK(p65.power > p55.power);
  }

  TEST_CASE("unreachable targets are not bracketed") {
    TempDir d("c2");
    auto c = small_config();
    c.calibrate.max_power = 50.0;
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_calibrate(c, 1.0, 55.0, d.path, log), NotBracketed);
  }
}

TEST_SUITE("train and evaluate") {
  TEST_CASE("learning curve has one row per update and repeats byte for byte") {
    TempDir a("ta"), b("tb");
    const auto c = small_config();
    std::ostringstream log;
    const auto ra = cmd_train(c, a.path, std::nullopt, log);
    cmd_train(c, b.path, std::nullopt, log);
    CHECK(ra.updates_done == 2);
    CHECK(line_count(a.path / "learning_curve.csv") == 3);
    CHECK(slurp(a.path / "learning_curve.csv").rfind("update,mean_reward,depth_std\n", 0) == 0);
    CHECK(slurp(a.path / "learning_curve.csv") == slurp(b.path / "learning_curve.csv"));
    CHECK(slurp(a.path / "checkpoint.bin") == slurp(b.path / "checkpoint.bin"));
    CHECK(fs::exists(a.path / "checkpoint.bin.json"));
    CHECK(load_config(a.path / "config.yaml") == c);
  }

  TEST_CASE("resuming matches an uninterrupted run") {
    TempDir full("rf"), part("rp");
    auto c = small_config();
    c.ppo.n_envs = 2;
    c.ppo.n_updates = 3;
    std::ostringstream log;
    cmd_train(c, full.path, std::nullopt, log);
    auto first = c;
    first.ppo.n_updates = 1;
    cmd_train(first, part.path, std::nullopt, log);
    const auto r = cmd_train(c, part.path, part.path / "checkpoint.bin", log);
    CHECK(r.updates_done == 3);
    CHECK(slurp(full.path / "checkpoint.bin") == slurp(part.path / "checkpoint.bin"));
    CHECK(slurp(full.path / "learning_curve.csv") == slurp(part.path / "learning_curve.csv"));
  }

  TEST_CASE("evaluating an untrained policy writes the full report") {
    TempDir d("ev");
    auto c = small_config();
    c.ppo.n_updates = 0;
    std::ostringstream log;
    const auto t = cmd_train(c, d.path, std::nullopt, log);
    const auto rep = cmd_evaluate(c, t.checkpoint, d.path / "eval", log);
    const auto steps = c.path.build().controls().size();
    CHECK(rep.policy.log.size() == steps);
    CHECK(rep.baselines.size() == c.evaluate.baseline_velocities.size());
    CHECK(rep.velocity.near_count + rep.velocity.far_count == steps);
    CHECK(line_count(d.path / "eval" / "velocity_trace.csv") == steps + 1);
    CHECK(line_count(d.path / "eval" / "summary.csv") == 1 + 1 + rep.baselines.size());
    CHECK(fs::exists(d.path / "eval" / "baseline_1.05.csv"));

    // every histogram column sums to the trace length
    std::ifstream h(d.path / "eval" / "depth_histogram.csv");
    std::string line;
    std::getline(h, line);
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) - 1;
    CHECK(columns == 1 + rep.baselines.size());
    std::vector<std::size_t> sums(columns, 0);
    while (std::getline(h, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::getline(ss, cell, ',');
      std::getline(ss, cell, ',');
      for (std::size_t k = 0; k < columns; ++k) {
        std::getline(ss, cell, ',');
        sums[k] += std::stoul(cell);
      }
    }
    for (auto s : sums) CHECK(s == steps);

    TempDir again("ev2");
    cmd_evaluate(c, t.checkpoint, again.path, log);
    for (const char* f : {"policy_episode.csv", "velocity_trace.csv", "depth_histogram.csv",
                          "summary.csv", "baseline_0.575.csv"}) {
      REQUIRE(fs::exists(again.path / f));
      CHECK(slurp(d.path / "eval" / f) == slurp(again.path / f));
    }
  }

  TEST_CASE("checkpoints for another observation size are rejected") {
    TempDir d("mm");
    ppo::Checkpoint ck;
    ck.params = ppo::PolicyParams::create(10, 8);
    ck.params.initialize(0, -1.0);
    ppo::save_checkpoint(d.path / "other.bin", ck);
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_evaluate(small_config(), d.path / "other.bin", d.path, log),
                    ppo::CheckpointMismatch);
  }

  TEST_CASE("training histories depend on the seed") {
    TempDir a("sa"), b("sb");
    auto c = small_config();
    std::ostringstream log;
    cmd_train(c, a.path, std::nullopt, log);
    c.seed = 99;
    cmd_train(c, b.path, std::nullopt, log);
    CHECK(slurp(a.path / "checkpoint.bin") != slurp(b.path / "checkpoint.bin"));
  }
}

TEST_SUITE("command line") {
  TEST_CASE("exit codes") {
    TempDir d("exit");
    CHECK(run_tool("--help") == 0);
    CHECK(run_tool("") == 2);
    CHECK(run_tool("simulate --bogus") == 2);
    {
      std::ofstream bad(d.path / "bad.yaml");
      bad << "laser:\n  powr: 1\n";
    }
    CHECK(run_tool("simulate --config " + (d.path / "bad.yaml").string()) == 2);
    CHECK(run_tool("simulate --config " + (d.path / "missing.yaml").string()) == 2);
    CHECK(run_tool("evaluate --out " + d.path.string()) == 2);
    CHECK(run_tool("evaluate --checkpoint " + (d.path / "none.bin").string() + " --out " +
                   d.path.string()) == 3);
  }

  TEST_CASE("tool runs are reproducible under a seed") {
    TempDir d("tool");
    save_config(d.path / "small.yaml", small_config());
    const auto cfg = (d.path / "small.yaml").string();
    for (const char* run : {"a", "b"})
      CHECK(run_tool("train --config " + cfg + " --seed 5 --updates 1 --out " +
                     (d.path / run).string()) == 0);
    CHECK(slurp(d.path / "a" / "learning_curve.csv") == slurp(d.path / "b" / "learning_curve.csv"));
    CHECK(run_tool("simulate --config " + cfg + " --velocity 1.2 --out " +
                   (d.path / "s").string()) == 0);
    CHECK(slurp(d.path / "s" / "summary.csv").find("v1.2,1.2,") != std::string::npos);
  }
}
