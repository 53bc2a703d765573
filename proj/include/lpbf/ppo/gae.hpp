#pragma once

#include <span>
#include <vector>

#include "lpbf/common.hpp"

namespace lpbf::ppo {

class LengthMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct AdvantageEstimate {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

/// Generalised advantage estimation over one trajectory. `dones[t]` marks a
/// terminal transition, which cuts both bootstrapping and the recursion;
/// `bootstrap` is the value after the last step when it is not terminal.
AdvantageEstimate gae(std::span<const double> rewards, std::span<const double> values,
                      const std::vector<bool>& dones, double gamma, double lambda,
                      double bootstrap = 0.0);

}  // namespace lpbf::ppo
