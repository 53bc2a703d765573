#include "lpbf/thermal/material.hpp"

#include <cmath>

#include "lpbf/common.hpp"

namespace lpbf::thermal {

void MaterialParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(absorptivity) || absorptivity > 1.0)
    throw InvalidArgument("absorptivity must lie in (0, 1]");
  if (!positive(conductivity)) throw InvalidArgument("conductivity must be > 0");
  if (!positive(heat_capacity)) throw InvalidArgument("heat_capacity must be > 0");
  if (!positive(density)) throw InvalidArgument("density must be > 0");
  if (!positive(ambient_temp)) throw InvalidArgument("ambient_temp must be > 0");
  if (!positive(melt_temp) || melt_temp <= ambient_temp)
    throw InvalidArgument("melt_temp must exceed ambient_temp");
}

void LaserParams::validate() const {
  if (!std::isfinite(power) || power < 0.0) throw InvalidArgument("laser power must be >= 0");
  if (!std::isfinite(beam_sigma_um) || beam_sigma_um <= 0.0)
    throw InvalidArgument("beam_sigma_um must be > 0");
}

double thermal_diffusivity(const MaterialParams& m) {
  return m.conductivity / (m.density * m.heat_capacity);
}

}  // namespace lpbf::thermal
