#pragma once

#include <iosfwd>
#include <filesystem>
#include <vector>

#include "lpbf/common.hpp"
#include "lpbf/thermal/grid.hpp"
#include "lpbf/thermal/material.hpp"

namespace lpbf::meltpool {

struct SurfacePeak {
  Vec2 position_um;
  double temperature = 0.0;  // K
};

/// Hottest point of the top layer, refined by a three-point parabola in x and
/// in y around the hottest cell. Equal maxima resolve to the cell nearest
/// `hint`; a uniform surface returns the hint itself.
SurfacePeak surface_peak(const thermal::TemperatureField& field, Vec2 hint_um);

/// Temperatures sampled down the column under a lateral position, one value
/// per layer (bilinear in x-y). Layer k sits at depth (k + 1/2) dx.
std::vector<double> column_at(const thermal::TemperatureField& field, Vec2 position_um);

/// Deepest point where a piecewise-linear column crosses `melt_temp`.
/// `column[0]` is held constant over the top half cell; depths are in um.
/// Returns 0 when column[0] <= melt_temp.
double column_melt_depth(const std::vector<double>& column, double dz_um, double melt_temp);

/// Depth of the melt pool under the surface peak, um.
double melt_depth(const thermal::TemperatureField& field, const thermal::MaterialParams& m,
                  Vec2 hint_um);

struct MeltDepthSample {
  double time_s = 0.0;
  Vec2 laser_um;
  double depth_um = 0.0;
  double peak_temp = 0.0;
};

/// Full depth measurement (peak + column) for one field.
MeltDepthSample measure(const thermal::TemperatureField& field, const thermal::MaterialParams& m,
                        Vec2 laser_um, double time_s);

/// Depth samples of one episode in strictly increasing time.
class MeltDepthTrace {
 public:
  void push_back(const MeltDepthSample& s);
  void clear() { samples_.clear(); }

  const std::vector<MeltDepthSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const MeltDepthSample& operator[](std::size_t i) const { return samples_[i]; }
  const MeltDepthSample& back() const { return samples_.back(); }

  std::vector<double> depths() const;
  double max_depth() const;
  double min_depth() const;

 private:
  std::vector<MeltDepthSample> samples_;
};

/// CSV with header `t_s,x_um,y_um,depth_um,peak_K`.
void write_trace_csv(std::ostream& out, const MeltDepthTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const MeltDepthTrace& trace);

}  // namespace lpbf::meltpool
