#pragma once

#include <optional>
#include <vector>

#include "lpbf/common.hpp"
#include "lpbf/thermal/grid.hpp"
#include "lpbf/thermal/material.hpp"

namespace lpbf::thermal {

class WindowTooSmall : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

/// How the stored values relate to the continuous solution.
enum class Sampling {
  /// Average over the dx^3 cell centred on each sample (finite-volume view;
  /// conserves energy on the grid).
  CellAverage,
  /// Pointwise value at the sample location.
  Point,
};

/// Mirror plane in the track-local frame (track runs from (0,0) along +x,
/// depth measured along +z). The image source is added with the given sign:
/// +1 for an adiabatic face, -1 for a face held at the reference temperature.
struct Mirror {
  enum class Axis { X, Y, Z };
  Axis axis = Axis::Y;
  double plane_um = 0.0;
  double sign = 1.0;
};

enum class Variant { Interior, Edge, Corner };

struct LineSolutionOptions {
  /// Lateral samples per grid cell. Values are stored on a sub-cell lattice so
  /// rotation by bilinear interpolation keeps the narrow beam peak.
  int oversample = 4;
  Sampling sampling = Sampling::CellAverage;
  /// Largest rise allowed on the window border, K.
  double border_threshold = 0.1;
  /// Relative change at the peak between successive quadrature refinements.
  double rel_tol = 1e-4;
  int min_panels = 4;
  int max_panels = 4096;
  /// Explicit window reach around the track; sized automatically if unset.
  std::optional<double> lateral_reach_um;
  std::optional<double> depth_reach_um;
  /// Virtual sources for boundary variants; at most one lateral mirror per axis.
  std::vector<Mirror> mirrors;
};

/// Temperature rise left by a Gaussian source moving along +x for one step,
/// sampled on a window anchored at the track start (local origin).
class LineSolution {
 public:
  double velocity() const { return velocity_; }
  double duration() const { return duration_; }
  double length_um() const { return velocity_ * duration_ / kMicron; }
  Variant variant() const { return variant_; }
  Sampling sampling() const { return sampling_; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  /// Lateral spacing of stored samples.
  double spacing_um() const { return spacing_um_; }
  double dx_um() const { return dx_um_; }
  /// Local coordinate of sample (0, 0).
  double x0_um() const { return x0_um_; }
  double y0_um() const { return y0_um_; }
  double x_at(int ix) const { return x0_um_ + ix * spacing_um_; }
  double y_at(int iy) const { return y0_um_ + iy * spacing_um_; }
  double x_extent_um() const { return (nx_ - 1) * spacing_um_; }
  double y_extent_um() const { return (ny_ - 1) * spacing_um_; }
  double depth_um() const { return nz_ * dx_um_; }

  double sample(int ix, int iy, int k) const {
    return values_[static_cast<std::size_t>(ix) +
                   static_cast<std::size_t>(nx_) *
                       (static_cast<std::size_t>(iy) +
                        static_cast<std::size_t>(ny_) * static_cast<std::size_t>(k))];
  }

  /// Bilinear interpolation in layer k at a local lateral position; zero
  /// outside the stored window.
  double interpolate(double x_local_um, double y_local_um, int k) const;

  double peak() const;
  /// Largest value on the lateral border and the bottom layer of the window.
  double border_max() const;
  /// Heat carried by the rise, J (lattice sum scaled to volume).
  double heat_content(const MaterialParams& m) const;

  std::size_t bytes() const { return values_.size() * sizeof(float); }

 private:
  friend LineSolution build_line_solution(const MaterialParams&, const LaserParams&,
                                          double, double, const GridSpec&,
                                          const LineSolutionOptions&);
  double velocity_ = 0.0;
  double duration_ = 0.0;
  Variant variant_ = Variant::Interior;
  Sampling sampling_ = Sampling::CellAverage;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  double spacing_um_ = 0.0;
  double dx_um_ = 0.0;
  double x0_um_ = 0.0;
  double y0_um_ = 0.0;
  std::vector<float> values_;
};

/// Eagar-Tsai rise for one step of duration `duration_s` at `velocity_mps`.
/// The time integral is evaluated in u = sqrt(tau) with composite
/// Gauss-Legendre panels, doubled until the peak settles to `rel_tol`.
LineSolution build_line_solution(const MaterialParams& m, const LaserParams& laser,
                                 double velocity_mps, double duration_s,
                                 const GridSpec& grid,
                                 const LineSolutionOptions& options = {});

}  // namespace lpbf::thermal
