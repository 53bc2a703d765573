#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lpbf {

struct StepOutcome {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

/// Minimal episodic environment with a scalar action in [-1, 1]; what the
/// trainer needs from a task.
class EpisodicEnv {
 public:
  virtual ~EpisodicEnv() = default;

  virtual std::size_t observation_size() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepOutcome step(double action) = 0;
};

}  // namespace lpbf
