#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "lpbf/ppo/adam.hpp"
#include "lpbf/ppo/policy.hpp"
#include "lpbf/ppo/update.hpp"

namespace lpbf::ppo {

/// Raised when a checkpoint is malformed or does not fit the expected model.
class CheckpointMismatch : public Error {
 public:
  using Error::Error;
};

struct Checkpoint {
  PolicyParams params;
  std::optional<AdamState> adam;
  std::size_t updates_done = 0;
  PPOConfig config;
};

/// Writes the binary weights file and a JSON sidecar at `<path>.json`.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Reads a checkpoint; the sidecar supplies the config when present.
/// When `expected_obs_size` is nonzero the network input must match it.
Checkpoint load_checkpoint(const std::filesystem::path& path, int expected_obs_size = 0);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace lpbf::ppo
