#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <deque>
#include <vector>

#include "lpbf/common.hpp"
#include "lpbf/thermal/boundary.hpp"
#include "lpbf/thermal/diffusion.hpp"
#include "lpbf/thermal/grid.hpp"
#include "lpbf/thermal/line_solution.hpp"
#include "lpbf/thermal/material.hpp"

namespace lpbf::thermal {

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

/// Faces whose image sources are folded into a placement. Reflections are
/// taken across each listed face; combinations give the corner images.
using FaceSet = std::vector<Face>;

/// Rotates `ls` by `theta` about its anchor, translates the anchor to `start`
/// and adds it to the field. Parts of the stored window that fall outside the
/// domain are reflected back across the faces in `images` (virtual sources);
/// crossing any other face raises OutOfDomain.
void orient_and_add(TemperatureField& field, const LineSolution& ls, Vec2 start_um, double theta,
                    const BoundaryCondition& bc = {}, const FaceSet& images = {});

/// Excess heat sum (T - T0) rho c_p dx^3 over all cells, J.
double excess_enthalpy(const TemperatureField& field, const MaterialParams& m);

/// Distance below which a face gets an image source: four diffusion lengths,
/// 4 sqrt(4 D dt), in micrometres.
double image_threshold_um(double diffusivity, double dt);

/// Shared store of line solutions keyed by quantised velocity and step length.
/// Reads may run concurrently; insertion is serialised.
class LineSolutionCache {
 public:
  struct Options {
    /// Relative width of the logarithmic velocity bins; 0 disables binning.
    double velocity_resolution = 0.005;
    std::size_t max_bytes = std::size_t{768} << 20;
    LineSolutionOptions solution{};
  };

  LineSolutionCache(const MaterialParams& m, const LaserParams& laser, const GridSpec& grid);
  LineSolutionCache(const MaterialParams& m, const LaserParams& laser, const GridSpec& grid,
                    Options options);

  /// Representative velocity of the bin containing v.
  double quantize(double velocity) const;

  /// Solution for a step of `length_um` at the quantised velocity.
  std::shared_ptr<const LineSolution> get(double velocity, double length_um);

  std::size_t size() const;
  std::size_t bytes() const;

  const MaterialParams& material() const { return material_; }
  const LaserParams& laser() const { return laser_; }
  double dx_um() const { return grid_.dx_um; }

 private:
  struct Key {
    std::int64_t velocity_bin;
    std::int64_t length_nm;
    auto operator<=>(const Key&) const = default;
  };
  Key key_for(double velocity, double length_um) const;
  double bin_velocity(std::int64_t bin) const;

  MaterialParams material_;
  LaserParams laser_;
  GridSpec grid_;
  Options options_;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const LineSolution>> entries_;
  std::deque<Key> order_;
  std::size_t bytes_ = 0;
};

struct StepResult {
  double dt = 0.0;        // s
  double velocity = 0.0;  // m/s actually simulated (after binning)
  Variant variant = Variant::Interior;
  FaceSet images;
};

/// Advances a temperature field one laser segment at a time: blur for the
/// elapsed time, then superpose the stored line solution for the segment.
class Simulator {
 public:
  Simulator(const MaterialParams& m, const LaserParams& laser, const GridSpec& grid,
            const BoundaryCondition& bc, std::shared_ptr<LineSolutionCache> cache = nullptr);

  const MaterialParams& material() const { return material_; }
  const LaserParams& laser() const { return laser_; }
  const GridSpec& grid() const { return grid_; }
  const BoundaryCondition& boundary() const { return bc_; }
  const std::shared_ptr<LineSolutionCache>& cache() const { return cache_; }

  StepResult advance(TemperatureField& field, Vec2 start_um, Vec2 end_um, double velocity) const;

  /// Faces needing image sources for a placement of `ls` at (start, theta).
  FaceSet select_images(const LineSolution& ls, Vec2 start_um, Vec2 end_um, double theta,
                        double dt) const;

  DiffusionKernel kernel_for(double dt) const;

 private:
  MaterialParams material_;
  LaserParams laser_;
  GridSpec grid_;
  BoundaryCondition bc_;
  std::shared_ptr<LineSolutionCache> cache_;
};

}  // namespace lpbf::thermal
