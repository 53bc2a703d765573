#pragma once

#include <vector>

#include "lpbf/common.hpp"
#include "lpbf/thermal/boundary.hpp"
#include "lpbf/thermal/grid.hpp"

namespace lpbf::thermal {

class KernelTooLarge : public Error {
 public:
  using Error::Error;
};

/// Separable Gaussian blur equivalent to free-space conduction over one step.
/// Only the 1D profile is stored; the 3D kernel is its triple outer product.
struct DiffusionKernel {
  int radius = 0;
  std::vector<double> weights{1.0};  // 2*radius + 1 taps
  double dt = 0.0;                   // s
  double diffusivity = 0.0;          // m^2/s

  bool is_identity() const { return radius == 0; }
};

/// Gaussian with standard deviation sqrt(2 D dt) / dx cells, truncated at
/// ceil(4 std) and renormalised to unit sum.
DiffusionKernel build_diffusion_kernel(double diffusivity, double dt, double dx_um);

/// Convolves the field in place, padding each face by reflection (adiabatic)
/// or reflection about t_ref (fixed temperature).
void diffuse(TemperatureField& field, const DiffusionKernel& kernel, const BoundaryCondition& bc);

}  // namespace lpbf::thermal
