#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "lpbf/common.hpp"

namespace lpbf::thermal {

/// Uniform cell-centred grid over the build domain.
///
/// Cell (i, j, k) spans [origin.x + i*dx, origin.x + (i+1)*dx] laterally and
/// [k*dx, (k+1)*dx] in depth. Layer k = 0 touches the top surface (z = 0);
/// z grows downward into the material.
struct GridSpec {
  double dx_um = 20.0;
  int nx = 63;
  int ny = 63;
  int nz = 16;
  Vec2 origin_um{-5.0, -5.0};

  void validate() const;

  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(ny) * static_cast<std::size_t>(k));
  }

  double x_center(int i) const { return origin_um.x + (i + 0.5) * dx_um; }
  double y_center(int j) const { return origin_um.y + (j + 0.5) * dx_um; }
  double z_center(int k) const { return (k + 0.5) * dx_um; }

  double x_min() const { return origin_um.x; }
  double x_max() const { return origin_um.x + nx * dx_um; }
  double y_min() const { return origin_um.y; }
  double y_max() const { return origin_um.y + ny * dx_um; }
  double depth() const { return nz * dx_um; }

  bool contains(Vec2 p) const {
    return p.x >= x_min() && p.x <= x_max() && p.y >= y_min() && p.y <= y_max();
  }

  bool operator==(const GridSpec&) const = default;
};

/// Temperatures (K) on a GridSpec, stored x-fastest.
class TemperatureField {
 public:
  TemperatureField(const GridSpec& grid, double initial_temp);

  const GridSpec& grid() const { return grid_; }

  double& at(int i, int j, int k) { return values_[grid_.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  void fill(double t) { std::fill(values_.begin(), values_.end(), t); }

  double max() const;
  double min() const;
  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

}  // namespace lpbf::thermal
