#include "lpbf/thermal/boundary.hpp"

#include <cmath>

#include "lpbf/common.hpp"

namespace lpbf::thermal {

std::string to_string(Face f) {
  switch (f) {
    case Face::XMin: return "x_min";
    case Face::XMax: return "x_max";
    case Face::YMin: return "y_min";
    case Face::YMax: return "y_max";
    case Face::Bottom: return "bottom";
  }
  return "?";
}

void BoundaryCondition::validate() const {
  for (Face f : kAllFaces) {
    const auto& c = (*this)[f];
    if (c.is_fixed() && (!std::isfinite(c.t_ref) || c.t_ref < 0.0))
      throw InvalidArgument("fixed temperature on face " + to_string(f) + " must be >= 0");
  }
}

}  // namespace lpbf::thermal
