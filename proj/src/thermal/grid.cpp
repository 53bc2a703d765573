#include "lpbf/thermal/grid.hpp"

#include <algorithm>
#include <cmath>

namespace lpbf::thermal {

void GridSpec::validate() const {
  if (!std::isfinite(dx_um) || dx_um <= 0.0) throw InvalidArgument("grid dx must be > 0");
  if (nx < 2 || ny < 2 || nz < 2) throw InvalidArgument("grid needs at least 2 cells per axis");
  if (!std::isfinite(origin_um.x) || !std::isfinite(origin_um.y))
    throw InvalidArgument("grid origin must be finite");
}

TemperatureField::TemperatureField(const GridSpec& grid, double initial_temp)
    : grid_(grid) {
  grid_.validate();
  values_.assign(grid_.size(), initial_temp);
}

double TemperatureField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double TemperatureField::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool TemperatureField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace lpbf::thermal
