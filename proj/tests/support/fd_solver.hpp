#pragma once

#include "lpbf/common.hpp"
#include "lpbf/thermal/boundary.hpp"
#include "lpbf/thermal/grid.hpp"
#include "lpbf/thermal/material.hpp"

namespace lpbf::testing {

/// Explicit finite-volume solver of dT/dt = D lap T + source, used as an
/// independent reference. Cell-centred on the same GridSpec; faces use ghost
/// cells (mirror for adiabatic, antisymmetric about t_ref for fixed).
/// The Gaussian surface flux is averaged over each top-cell footprint and
/// deposited into layer 0.
class FiniteDifferenceSolver {
 public:
  FiniteDifferenceSolver(const thermal::MaterialParams& m, const thermal::LaserParams& laser,
                         const thermal::GridSpec& grid, const thermal::BoundaryCondition& bc,
                         double stability_fraction = 0.125);

  /// Moves the laser from a to b at constant speed, integrating in time.
  void scan(thermal::TemperatureField& field, Vec2 a_um, Vec2 b_um, double velocity) const;

  double time_step() const { return dt_; }

 private:
  void step(thermal::TemperatureField& field, std::vector<double>& scratch, Vec2 laser_um,
            double dt) const;

  thermal::MaterialParams m_;
  thermal::LaserParams laser_;
  thermal::GridSpec grid_;
  thermal::BoundaryCondition bc_;
  double dt_;
};

}  // namespace lpbf::testing
