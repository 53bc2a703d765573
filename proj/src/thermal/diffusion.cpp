#include "lpbf/thermal/diffusion.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace lpbf::thermal {
namespace {

/// Reflects an out-of-range index across the nearer face (single reflection).
inline int reflect(int idx, int n) {
  if (idx < 0) return -1 - idx;
  if (idx >= n) return 2 * n - 1 - idx;
  return idx;
}

/// Convolves `count` independent lines of length n stored with the given
/// strides. `src` and `dst` must not alias.
struct LineBlur {
  const DiffusionKernel& kernel;
  const FaceCondition& low;
  const FaceCondition& high;

  void operator()(const double* src, double* dst, int n, std::ptrdiff_t stride,
                  std::vector<double>& pad) const {
    const int r = kernel.radius;
    pad.resize(static_cast<std::size_t>(n + 2 * r));
    for (int i = -r; i < n + r; ++i) {
      const double v = src[reflect(i, n) * stride];
      double p = v;
      if (i < 0) p = low.ghost(v);
      else if (i >= n) p = high.ghost(v);
      pad[static_cast<std::size_t>(i + r)] = p;
    }
    const double* w = kernel.weights.data();
    for (int i = 0; i < n; ++i) {
      const double* win = pad.data() + i;
      double acc = 0.0;
      for (int m = 0; m <= 2 * r; ++m) acc += w[m] * win[m];
      dst[i * stride] = acc;
    }
  }
};

}  // namespace

DiffusionKernel build_diffusion_kernel(double diffusivity, double dt, double dx_um) {
  if (!(diffusivity > 0.0) || !(dt > 0.0) || !(dx_um > 0.0))
    throw InvalidArgument("diffusion kernel needs D, dt, dx > 0");
  DiffusionKernel k;
  k.dt = dt;
  k.diffusivity = diffusivity;
  const double std_cells = std::sqrt(2.0 * diffusivity * dt) / (dx_um * kMicron);
  if (std_cells < 0.01) return k;
  k.radius = static_cast<int>(std::ceil(4.0 * std_cells));
  k.weights.resize(static_cast<std::size_t>(2 * k.radius + 1));
  for (int i = -k.radius; i <= k.radius; ++i)
    k.weights[static_cast<std::size_t>(i + k.radius)] =
        std::exp(-0.5 * i * i / (std_cells * std_cells));
  const double sum = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
  for (double& w : k.weights) w /= sum;
  return k;
}

void diffuse(TemperatureField& field, const DiffusionKernel& kernel, const BoundaryCondition& bc) {
  if (kernel.is_identity()) return;
  const GridSpec& g = field.grid();
  if (kernel.radius >= std::min({g.nx, g.ny, g.nz})) {
    std::ostringstream msg;
    msg << "diffusion kernel radius " << kernel.radius << " does not fit grid " << g.nx << "x"
        << g.ny << "x" << g.nz;
    throw KernelTooLarge(msg.str());
  }
  static const FaceCondition top = FaceCondition::adiabatic();
  const std::ptrdiff_t sx = 1, sy = g.nx, sz = static_cast<std::ptrdiff_t>(g.nx) * g.ny;

  std::vector<double> tmp(field.values().begin(), field.values().end());
  std::vector<double> pad;
  double* a = field.values().data();
  double* b = tmp.data();

  // x: a -> b
  const LineBlur bx{kernel, bc[Face::XMin], bc[Face::XMax]};
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j) bx(a + j * sy + k * sz, b + j * sy + k * sz, g.nx, sx, pad);
  // y: b -> a
  const LineBlur by{kernel, bc[Face::YMin], bc[Face::YMax]};
  for (int k = 0; k < g.nz; ++k)
    for (int i = 0; i < g.nx; ++i) by(b + i + k * sz, a + i + k * sz, g.ny, sy, pad);
  // z: a -> b, then copy back
  const LineBlur bz{kernel, top, bc[Face::Bottom]};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) bz(a + i + j * sy, b + i + j * sy, g.nz, sz, pad);
  std::copy(tmp.begin(), tmp.end(), field.values().begin());
}

}  // namespace lpbf::thermal
