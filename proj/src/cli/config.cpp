#include "lpbf/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace lpbf::cli {

namespace {

std::string where(const std::string& source, const YAML::Mark& mark) {
  if (mark.is_null()) return source;
  return source + ":" + std::to_string(mark.line + 1);
}

/// One mapping of the document; records which keys were read so that the
/// rest can be reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string name, const std::string& source, YAML::Mark fallback)
      : node_(std::move(node)), name_(std::move(name)), source_(source), mark_(fallback) {
    if (node_ && !node_.IsNull()) {
      mark_ = node_.Mark();
      if (!node_.IsMap()) fail(mark_, "section '" + name_ + "' must be a mapping");
    }
  }

  template <class T>
  void get(const std::string& key, T& out) {
    known_.insert(key);
    const YAML::Node v = lookup(key);
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v.Mark(), "invalid value for '" + qualified(key) + "'");
    }
  }

  void get(const std::string& key, std::optional<double>& out) {
    known_.insert(key);
    const YAML::Node v = lookup(key);
    if (!v) return;
    if (v.IsNull()) {
      out.reset();
      return;
    }
    double d = 0.0;
    get(key, d);
    out = d;
  }

  void get(const std::string& key, std::filesystem::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  Section sub(const std::string& key) {
    known_.insert(key);
    return Section(lookup(key), qualified(key), source_, mark_);
  }

  /// Rejects keys that were never read.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!known_.count(key)) fail(kv.first.Mark(), "unknown key '" + qualified(key) + "'");
    }
  }

  /// Runs a validation step, attributing failures to this section.
  template <class F>
  void check(F&& f) const {
    try {
      f();
    } catch (const InvalidArgument& e) {
      fail(mark_, name_ + ": " + e.what());
    }
  }

  [[noreturn]] void fail(const YAML::Mark& mark, const std::string& msg) const {
    throw ConfigError(where(source_, mark) + ": " + msg);
  }

  const YAML::Mark& mark() const { return mark_; }

 private:
  YAML::Node lookup(const std::string& key) const {
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    for (const auto& kv : node_)
      if (kv.first.as<std::string>() == key) return kv.second;
    return YAML::Node(YAML::NodeType::Undefined);
  }
  std::string qualified(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  YAML::Node node_;
  std::string name_;
  const std::string& source_;
  YAML::Mark mark_;
  std::set<std::string> known_;
};

constexpr std::array<const char*, 5> kFaceKeys{"x_min", "x_max", "y_min", "y_max", "bottom"};

void read_face(Section s, thermal::FaceCondition& f) {
  std::string kind = f.is_fixed() ? "fixed" : "adiabatic";
  s.get("kind", kind);
  s.get("t_ref", f.t_ref);
  s.finish();
  if (kind == "adiabatic")
    f.kind = thermal::FaceCondition::Kind::Adiabatic;
  else if (kind == "fixed")
    f.kind = thermal::FaceCondition::Kind::FixedTemp;
  else
    s.fail(s.mark(), "face kind must be 'adiabatic' or 'fixed', got '" + kind + "'");
}

std::string number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

YAML::Node numbers(const std::vector<double>& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (double x : v) n.push_back(number(x));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

}  // namespace

scanpath::ScanPath PathConfig::build() const {
  if (kind == Kind::CrossHatch) return scanpath::cross_hatch(length_um, hatch_um, rows, interval_um);
  scanpath::TriangleSpec t;
  t.domain_um = domain_um;
  t.first_fraction = first_fraction;
  t.shrink = shrink;
  t.interior_angle_deg = interior_angle_deg;
  t.min_length_um = min_length_um;
  return scanpath::concentric_triangles(t, interval_um);
}

env::EnvConfig RunConfig::env_config() const {
  env::EnvConfig c;
  c.material = material;
  c.laser = laser;
  c.grid = grid;
  c.boundary = boundary;
  c.path = path.build();
  c.velocity = velocity;
  c.reward = reward;
  c.observation = observation;
  return c;
}

ppo::PPOConfig RunConfig::ppo_config() const {
  auto c = ppo;
  c.seed = seed;
  return c;
}

void RunConfig::validate() const {
  auto wrap = [](const std::string& section, auto&& f) {
    try {
      f();
    } catch (const InvalidArgument& e) {
      throw ConfigError(section + ": " + e.what());
    }
  };
  wrap("path", [&] { env_config().validate(); });
  wrap("ppo", [&] { ppo.validate(); });
  wrap("simulate", [&] {
    if (!(simulate.velocity > 0.0)) throw InvalidArgument("velocity must be > 0");
    for (double t : simulate.snapshot_times_s)
      if (!(t >= 0.0)) throw InvalidArgument("snapshot times must be >= 0");
  });
  wrap("calibrate", [&] {
    if (!(calibrate.velocity > 0.0)) throw InvalidArgument("velocity must be > 0");
    if (!(calibrate.target_depth_um >= 0.0)) throw InvalidArgument("target depth must be >= 0");
    if (!(calibrate.track_length_um > 0.0)) throw InvalidArgument("track length must be > 0");
    if (!(calibrate.max_power > 0.0)) throw InvalidArgument("max power must be > 0");
    if (!(calibrate.tolerance_um > 0.0)) throw InvalidArgument("tolerance must be > 0");
  });
  wrap("train", [&] {
    if (train.checkpoint_every < 1) throw InvalidArgument("checkpoint_every must be >= 1");
  });
  wrap("evaluate", [&] {
    if (evaluate.baseline_velocities.size() < 5)
      throw InvalidArgument("at least 5 baseline velocities are required");
    for (double v : evaluate.baseline_velocities)
      if (!(v > 0.0)) throw InvalidArgument("baseline velocities must be > 0");
    if (!(evaluate.histogram_bin_um > 0.0)) throw InvalidArgument("histogram bin must be > 0");
    if (!(evaluate.turnaround_radius_um >= 0.0))
      throw InvalidArgument("turnaround radius must be >= 0");
  });
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(source, e.mark) + ": " + e.msg);
  }
  RunConfig c;
  Section root(doc, "", source, YAML::Mark::null_mark());

  root.get("seed", c.seed);
  root.get("output_dir", c.output_dir);

  auto material = root.sub("material");
  material.get("absorptivity", c.material.absorptivity);
  material.get("conductivity", c.material.conductivity);
  material.get("heat_capacity", c.material.heat_capacity);
  material.get("density", c.material.density);
  material.get("melt_temp", c.material.melt_temp);
  material.get("ambient_temp", c.material.ambient_temp);
  material.finish();
  material.check([&] { c.material.validate(); });

  auto laser = root.sub("laser");
  laser.get("power", c.laser.power);
  laser.get("beam_sigma_um", c.laser.beam_sigma_um);
  laser.finish();
  laser.check([&] { c.laser.validate(); });

  auto grid = root.sub("grid");
  grid.get("dx_um", c.grid.dx_um);
  grid.get("nx", c.grid.nx);
  grid.get("ny", c.grid.ny);
  grid.get("nz", c.grid.nz);
  grid.get("origin_x_um", c.grid.origin_um.x);
  grid.get("origin_y_um", c.grid.origin_um.y);
  grid.finish();
  grid.check([&] { c.grid.validate(); });

  auto boundary = root.sub("boundary");
  for (std::size_t f = 0; f < kFaceKeys.size(); ++f)
    read_face(boundary.sub(kFaceKeys[f]), c.boundary.faces[f]);
  boundary.finish();
  boundary.check([&] { c.boundary.validate(); });

  auto path = root.sub("path");
  std::string kind = c.path.kind == PathConfig::Kind::CrossHatch ? "cross_hatch" : "triangles";
  path.get("kind", kind);
  path.get("interval_um", c.path.interval_um);
  auto hatch = path.sub("cross_hatch");
  hatch.get("length_um", c.path.length_um);
  hatch.get("hatch_um", c.path.hatch_um);
  hatch.get("rows", c.path.rows);
  hatch.finish();
  auto tri = path.sub("triangles");
  tri.get("domain_um", c.path.domain_um);
  tri.get("first_fraction", c.path.first_fraction);
  tri.get("shrink", c.path.shrink);
  tri.get("interior_angle_deg", c.path.interior_angle_deg);
  tri.get("min_length_um", c.path.min_length_um);
  tri.finish();
  path.finish();
  if (kind == "cross_hatch")
    c.path.kind = PathConfig::Kind::CrossHatch;
  else if (kind == "triangles")
    c.path.kind = PathConfig::Kind::Triangles;
  else
    path.fail(path.mark(), "path.kind must be 'cross_hatch' or 'triangles', got '" + kind + "'");
  path.check([&] { c.path.build(); });

  auto velocity = root.sub("velocity");
  velocity.get("v_min", c.velocity.v_min);
  velocity.get("v_max", c.velocity.v_max);
  velocity.finish();
  velocity.check([&] { c.velocity.validate(); });

  auto reward = root.sub("reward");
  reward.get("target_depth_um", c.reward.target_depth_um);
  reward.get("range_weight", c.reward.range_weight);
  reward.get("range_normalizer_um", c.reward.range_normalizer_um);
  reward.finish();
  reward.check([&] { c.reward.validate(); });

  auto obs = root.sub("observation");
  obs.get("window_um", c.observation.window_um);
  obs.get("history", c.observation.history);
  obs.finish();
  obs.check([&] { c.observation.validate(c.grid.dx_um); });

  auto ppo = root.sub("ppo");
  ppo.get("clip", c.ppo.clip);
  ppo.get("gamma", c.ppo.gamma);
  ppo.get("lambda", c.ppo.lambda);
  ppo.get("epochs", c.ppo.epochs);
  ppo.get("minibatch", c.ppo.minibatch);
  ppo.get("learning_rate", c.ppo.learning_rate);
  ppo.get("n_envs", c.ppo.n_envs);
  ppo.get("n_updates", c.ppo.n_updates);
  ppo.get("value_coef", c.ppo.value_coef);
  ppo.get("entropy_coef", c.ppo.entropy_coef);
  std::string opt = c.ppo.optimizer == ppo::Optimizer::Adam ? "adam" : "sgd";
  ppo.get("optimizer", opt);
  ppo.get("hidden", c.ppo.hidden);
  ppo.get("init_log_std", c.ppo.init_log_std);
  ppo.finish();
  if (opt == "adam")
    c.ppo.optimizer = ppo::Optimizer::Adam;
  else if (opt == "sgd")
    c.ppo.optimizer = ppo::Optimizer::Sgd;
  else
    ppo.fail(ppo.mark(), "ppo.optimizer must be 'adam' or 'sgd', got '" + opt + "'");
  ppo.check([&] { c.ppo.validate(); });

  auto sim = root.sub("simulate");
  sim.get("velocity", c.simulate.velocity);
  sim.get("snapshot_times_s", c.simulate.snapshot_times_s);
  sim.finish();

  auto cal = root.sub("calibrate");
  cal.get("velocity", c.calibrate.velocity);
  cal.get("target_depth_um", c.calibrate.target_depth_um);
  cal.get("track_length_um", c.calibrate.track_length_um);
  cal.get("max_power", c.calibrate.max_power);
  cal.get("tolerance_um", c.calibrate.tolerance_um);
  cal.finish();

  auto train = root.sub("train");
  train.get("checkpoint_every", c.train.checkpoint_every);
  train.finish();

  auto eval = root.sub("evaluate");
  eval.get("baseline_velocities", c.evaluate.baseline_velocities);
  eval.get("histogram_bin_um", c.evaluate.histogram_bin_um);
  eval.get("turnaround_radius_um", c.evaluate.turnaround_radius_um);
  eval.finish();

  root.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.string());
}

std::string emit_config(const RunConfig& c) {
  YAML::Node root;
  root["seed"] = c.seed;
  root["output_dir"] = c.output_dir.string();

  YAML::Node m;
  m["absorptivity"] = number(c.material.absorptivity);
  m["conductivity"] = number(c.material.conductivity);
  m["heat_capacity"] = number(c.material.heat_capacity);
  m["density"] = number(c.material.density);
  m["melt_temp"] = number(c.material.melt_temp);
  m["ambient_temp"] = number(c.material.ambient_temp);
  root["material"] = m;

  YAML::Node l;
  l["power"] = number(c.laser.power);
  l["beam_sigma_um"] = number(c.laser.beam_sigma_um);
  root["laser"] = l;

  YAML::Node g;
  g["dx_um"] = number(c.grid.dx_um);
  g["nx"] = c.grid.nx;
  g["ny"] = c.grid.ny;
  g["nz"] = c.grid.nz;
  g["origin_x_um"] = number(c.grid.origin_um.x);
  g["origin_y_um"] = number(c.grid.origin_um.y);
  root["grid"] = g;

  YAML::Node b;
  for (std::size_t f = 0; f < kFaceKeys.size(); ++f) {
    YAML::Node face;
    face["kind"] = c.boundary.faces[f].is_fixed() ? "fixed" : "adiabatic";
    face["t_ref"] = number(c.boundary.faces[f].t_ref);
    b[kFaceKeys[f]] = face;
  }
  root["boundary"] = b;

  YAML::Node p;
  p["kind"] = c.path.kind == PathConfig::Kind::CrossHatch ? "cross_hatch" : "triangles";
  p["interval_um"] = number(c.path.interval_um);
  YAML::Node ph;
  ph["length_um"] = number(c.path.length_um);
  ph["hatch_um"] = number(c.path.hatch_um);
  ph["rows"] = c.path.rows;
  p["cross_hatch"] = ph;
  YAML::Node pt;
  pt["domain_um"] = number(c.path.domain_um);
  pt["first_fraction"] = number(c.path.first_fraction);
  pt["shrink"] = number(c.path.shrink);
  pt["interior_angle_deg"] = number(c.path.interior_angle_deg);
  pt["min_length_um"] = number(c.path.min_length_um);
  p["triangles"] = pt;
  root["path"] = p;

  YAML::Node v;
  v["v_min"] = number(c.velocity.v_min);
  v["v_max"] = number(c.velocity.v_max);
  root["velocity"] = v;

  YAML::Node r;
  r["target_depth_um"] = number(c.reward.target_depth_um);
  r["range_weight"] = number(c.reward.range_weight);
  if (c.reward.range_normalizer_um) r["range_normalizer_um"] = number(*c.reward.range_normalizer_um);
  root["reward"] = r;

  YAML::Node o;
  o["window_um"] = number(c.observation.window_um);
  o["history"] = c.observation.history;
  root["observation"] = o;

  YAML::Node q;
  q["clip"] = number(c.ppo.clip);
  q["gamma"] = number(c.ppo.gamma);
  q["lambda"] = number(c.ppo.lambda);
  q["epochs"] = c.ppo.epochs;
  q["minibatch"] = c.ppo.minibatch;
  q["learning_rate"] = number(c.ppo.learning_rate);
  q["n_envs"] = c.ppo.n_envs;
  q["n_updates"] = c.ppo.n_updates;
  q["value_coef"] = number(c.ppo.value_coef);
  q["entropy_coef"] = number(c.ppo.entropy_coef);
  q["optimizer"] = c.ppo.optimizer == ppo::Optimizer::Adam ? "adam" : "sgd";
  q["hidden"] = c.ppo.hidden;
  q["init_log_std"] = number(c.ppo.init_log_std);
  root["ppo"] = q;

  YAML::Node s;
  s["velocity"] = number(c.simulate.velocity);
  s["snapshot_times_s"] = numbers(c.simulate.snapshot_times_s);
  root["simulate"] = s;

  YAML::Node k;
  k["velocity"] = number(c.calibrate.velocity);
  k["target_depth_um"] = number(c.calibrate.target_depth_um);
  k["track_length_um"] = number(c.calibrate.track_length_um);
  k["max_power"] = number(c.calibrate.max_power);
  k["tolerance_um"] = number(c.calibrate.tolerance_um);
  root["calibrate"] = k;

  YAML::Node t;
  t["checkpoint_every"] = c.train.checkpoint_every;
  root["train"] = t;

  YAML::Node e;
  e["baseline_velocities"] = numbers(c.evaluate.baseline_velocities);
  e["histogram_bin_um"] = number(c.evaluate.histogram_bin_um);
  e["turnaround_radius_um"] = number(c.evaluate.turnaround_radius_um);
  root["evaluate"] = e;

  YAML::Emitter out;
  out << root;
  return std::string(out.c_str()) + "\n";
}

void save_config(const std::filesystem::path& file, const RunConfig& cfg) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw Error("cannot write config file " + file.string());
  out << emit_config(cfg);
}

}  // namespace lpbf::cli
