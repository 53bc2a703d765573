#include "lpbf/ppo/checkpoint.hpp"

#include <array>
#include <fstream>

#include <json.hpp>

#include "lpbf/io/binary.hpp"

namespace lpbf::ppo {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'P', 'O', 'C'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  io::write_le(os, v);
}

template <class T>
T get(std::istream& is) {
  try {
    return io::read_le<T>(is);
  } catch (const Error&) {
    throw CheckpointMismatch("checkpoint file is truncated");
  }
}

void put_vector(std::ostream& os, const Eigen::VectorXd& v) {
  for (double x : v) put(os, x);
}

Eigen::VectorXd get_vector(std::istream& is, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = get<double>(is);
  return v;
}

void put_mlp_shape(std::ostream& os, const Mlp& m) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.sizes().size()));
  for (int s : m.sizes()) put<std::uint32_t>(os, static_cast<std::uint32_t>(s));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.hidden_activation()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.output_activation()));
}

Mlp get_mlp_shape(std::istream& is) {
  const auto n = get<std::uint32_t>(is);
  if (n < 2 || n > 64) throw CheckpointMismatch("checkpoint has an invalid layer table");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto s = get<std::uint32_t>(is);
    if (s == 0 || s > (1u << 20)) throw CheckpointMismatch("checkpoint has an invalid layer width");
    sizes.push_back(static_cast<int>(s));
  }
  const auto h = get<std::uint32_t>(is);
  const auto o = get<std::uint32_t>(is);
  if (h > 1 || o > 1) throw CheckpointMismatch("checkpoint has an unknown activation");
  return Mlp(sizes, static_cast<Activation>(h), static_cast<Activation>(o));
}

nlohmann::json config_to_json(const PPOConfig& c) {
  return {{"clip", c.clip},
          {"gamma", c.gamma},
          {"lambda", c.lambda},
          {"epochs", c.epochs},
          {"minibatch", c.minibatch},
          {"learning_rate", c.learning_rate},
          {"n_envs", c.n_envs},
          {"n_updates", c.n_updates},
          {"seed", c.seed},
          {"value_coef", c.value_coef},
          {"entropy_coef", c.entropy_coef},
          {"optimizer", c.optimizer == Optimizer::Adam ? "adam" : "sgd"},
          {"hidden", c.hidden},
          {"init_log_std", c.init_log_std}};
}

PPOConfig config_from_json(const nlohmann::json& j) {
  PPOConfig c;
  c.clip = j.at("clip").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.minibatch = j.at("minibatch").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.n_envs = j.at("n_envs").get<int>();
  c.n_updates = j.at("n_updates").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.value_coef = j.at("value_coef").get<double>();
  c.entropy_coef = j.at("entropy_coef").get<double>();
  const auto opt = j.at("optimizer").get<std::string>();
  if (opt != "adam" && opt != "sgd") throw CheckpointMismatch("unknown optimizer " + opt);
  c.optimizer = opt == "adam" ? Optimizer::Adam : Optimizer::Sgd;
  c.hidden = j.at("hidden").get<int>();
  c.init_log_std = j.at("init_log_std").get<double>();
  return c;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write checkpoint " + path.string());
    os.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(os, kVersion);
    put_mlp_shape(os, ckpt.params.policy);
    put_mlp_shape(os, ckpt.params.value);
    put<std::uint64_t>(os, ckpt.updates_done);
    put_vector(os, ckpt.params.flatten());
    put<std::uint32_t>(os, ckpt.adam ? 1 : 0);
    if (ckpt.adam) {
      put<std::int64_t>(os, ckpt.adam->step);
      put_vector(os, ckpt.adam->m);
      put_vector(os, ckpt.adam->v);
    }
    if (!os) throw Error("failed writing checkpoint " + path.string());
  }
  nlohmann::json side{{"format_version", kVersion},
                      {"updates_done", ckpt.updates_done},
                      {"seed", ckpt.config.seed},
                      {"parameter_count", ckpt.params.parameter_count()},
                      {"observation_size", ckpt.params.policy.input_size()},
                      {"config", config_to_json(ckpt.config)}};
  std::ofstream js(sidecar_path(path));
  if (!js) throw Error("cannot write checkpoint sidecar for " + path.string());
  js << side.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path, int expected_obs_size) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint " + path.string());
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    throw CheckpointMismatch(path.string() + " is not a policy checkpoint");
  if (get<std::uint32_t>(is) != kVersion)
    throw CheckpointMismatch("unsupported checkpoint version in " + path.string());

  Checkpoint ck;
  ck.params.policy = get_mlp_shape(is);
  ck.params.value = get_mlp_shape(is);
  if (ck.params.policy.input_size() != ck.params.value.input_size())
    throw CheckpointMismatch("policy and value inputs differ in " + path.string());
  if (expected_obs_size != 0 && ck.params.policy.input_size() != expected_obs_size)
    throw CheckpointMismatch("checkpoint expects observations of size " +
                             std::to_string(ck.params.policy.input_size()) + ", got " +
                             std::to_string(expected_obs_size));
  ck.updates_done = get<std::uint64_t>(is);
  const auto n = static_cast<Eigen::Index>(ck.params.parameter_count());
  ck.params.unflatten(get_vector(is, n));
  if (get<std::uint32_t>(is)) {
    AdamState st;
    st.step = get<std::int64_t>(is);
    st.m = get_vector(is, n);
    st.v = get_vector(is, n);
    ck.adam = std::move(st);
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw CheckpointMismatch("trailing bytes in checkpoint " + path.string());

  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    try {
      std::ifstream js(side);
      const auto j = nlohmann::json::parse(js);
      ck.config = config_from_json(j.at("config"));
      if (j.at("updates_done").get<std::size_t>() != ck.updates_done)
        throw CheckpointMismatch("sidecar update count disagrees with " + path.string());
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointMismatch("malformed checkpoint sidecar: " + std::string(e.what()));
    }
    ck.config.hidden = ck.params.policy.sizes()[1];
  }
  return ck;
}

}  // namespace lpbf::ppo
