#pragma once

#include <array>
#include <vector>

#include "lpbf/common.hpp"
#include "lpbf/thermal/boundary.hpp"
#include "lpbf/thermal/grid.hpp"

namespace lpbf::env {

/// Geometry of the local heat-map crops fed to the policy.
struct ObservationSpec {
  double window_um = 160.0;
  int history = 3;

  /// Samples per crop side for a grid of spacing dx; the window must be a
  /// whole number of cells.
  int cells_per_side(double dx_um) const;
  std::size_t size(double dx_um) const;

  void validate(double dx_um) const;
  bool operator==(const ObservationSpec&) const = default;
};

constexpr int kPlanes = 3;

/// One set of crops around the laser, each n x n and row-major:
/// x-y on the surface (row = y, column = x), x-z (row = depth, column = x)
/// and y-z (row = depth, column = y).
struct PlaneMaps {
  std::array<std::vector<double>, kPlanes> maps;
};

/// Crops the field around `laser_um`. Lateral sample m sits at
/// laser + (m - (n - 1) / 2) dx, depth sample k at the centre of layer k.
/// Lateral values are bilinear; cells beyond a face are filled by the
/// face's ghost rule.
PlaneMaps observe(const thermal::TemperatureField& field, Vec2 laser_um,
                  const ObservationSpec& layout, const thermal::BoundaryCondition& bc = {});

/// Subtracts the joint mean and divides by the joint standard deviation,
/// floored at `std_floor`.
std::vector<double> whiten(const std::vector<double>& raw, double std_floor = 1e-3);

/// Concatenates the history oldest first, planes in the order above.
std::vector<double> flatten(const std::vector<PlaneMaps>& history);

}  // namespace lpbf::env
