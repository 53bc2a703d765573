#include "lpbf/thermal/line_solution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace lpbf::thermal {
namespace {

constexpr int kGaussOrder = 8;

struct GaussRule {
  std::array<double, kGaussOrder> nodes{};    // on [-1, 1]
  std::array<double, kGaussOrder> weights{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, kGaussOrder>;
    GaussRule r;
    const auto& a = Gauss::abscissa();
    const auto& w = Gauss::weights();
    // Boost stores the non-negative half of a symmetric rule.
    int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      r.nodes[n] = a[i];
      r.weights[n++] = w[i];
      if (a[i] != 0.0) {
        r.nodes[n] = -a[i];
        r.weights[n++] = w[i];
      }
    }
    return r;
  }();
  return rule;
}

/// Physical constants of one build, all lengths in micrometres.
struct Kernel {
  double amplitude;  // A P / (rho c_p), K um^3 / s
  double diff;       // um^2 / s
  double sigma2;     // um^2
  double speed;      // um / s
  double duration;   // s
  double dx;         // um
  Sampling sampling;
  std::vector<Mirror> mirrors;
};

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

/// Lateral density (1/um) of the spot spread over time s, centred at c,
/// either averaged over the cell [x - dx/2, x + dx/2] or sampled at x.
double lateral_factor(const Kernel& k, double x, double c, double var) {
  if (k.sampling == Sampling::Point) {
    const double d = x - c;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
  }
  const double sd = std::sqrt(var);
  return (normal_cdf((x + 0.5 * k.dx - c) / sd) - normal_cdf((x - 0.5 * k.dx - c) / sd)) / k.dx;
}

/// Depth density (1/um) including the adiabatic top-surface image, for the
/// layer centred at z. Multiplied by 2u so the integrand is regular in u.
double depth_factor_du(const Kernel& k, double z, double u) {
  const double s = u * u;
  if (s <= 0.0) return 0.0;
  const double scale = std::sqrt(4.0 * k.diff * s);
  if (k.sampling == Sampling::Point) {
    // 2u * 2 / sqrt(4 pi D s) exp(-z^2 / 4Ds) = 2 / sqrt(pi D) exp(...)
    return 2.0 / std::sqrt(kPi * k.diff) * std::exp(-z * z / (scale * scale));
  }
  const double a = z - 0.5 * k.dx;
  const double b = z + 0.5 * k.dx;
  return 2.0 * u * (std::erf(b / scale) - std::erf(a / scale)) / k.dx;
}

double apply_mirrors_lateral(const Kernel& k, Mirror::Axis axis, double x, double c, double var) {
  double v = lateral_factor(k, x, c, var);
  for (const auto& m : k.mirrors)
    if (m.axis == axis) v += m.sign * lateral_factor(k, 2.0 * m.plane_um - x, c, var);
  return v;
}

double apply_mirrors_depth(const Kernel& k, double z, double u) {
  double v = depth_factor_du(k, z, u);
  for (const auto& m : k.mirrors)
    if (m.axis == Mirror::Axis::Z) v += m.sign * depth_factor_du(k, 2.0 * m.plane_um - z, u);
  return v;
}

struct Lattice {
  std::vector<double> xs, ys, zs;
};

/// Accumulates the integral for every point of a tensor lattice.
/// `out` is indexed x-fastest. Returns nothing; adds into out.
void integrate_lattice(const Kernel& k, const Lattice& lat, int panels, std::vector<double>& out) {
  const auto& rule = gauss_rule();
  const std::size_t nx = lat.xs.size(), ny = lat.ys.size(), nz = lat.zs.size();
  out.assign(nx * ny * nz, 0.0);
  std::vector<double> gx(nx), gy(ny), gz(nz);
  const double umax = std::sqrt(k.duration);
  const double h = umax / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int q = 0; q < kGaussOrder; ++q) {
      const double u = mid + 0.5 * h * rule.nodes[q];
      const double w = 0.5 * h * rule.weights[q] * k.amplitude;
      const double s = u * u;
      const double var = k.sigma2 + 2.0 * k.diff * s;
      const double centre = k.speed * (k.duration - s);
      for (std::size_t i = 0; i < nx; ++i)
        gx[i] = apply_mirrors_lateral(k, Mirror::Axis::X, lat.xs[i], centre, var);
      for (std::size_t j = 0; j < ny; ++j)
        gy[j] = apply_mirrors_lateral(k, Mirror::Axis::Y, lat.ys[j], 0.0, var);
      for (std::size_t l = 0; l < nz; ++l) gz[l] = w * apply_mirrors_depth(k, lat.zs[l], u);
      for (std::size_t l = 0; l < nz; ++l) {
        if (gz[l] == 0.0) continue;
        for (std::size_t j = 0; j < ny; ++j) {
          const double f = gz[l] * gy[j];
          if (f == 0.0) continue;
          double* row = out.data() + (l * ny + j) * nx;
          for (std::size_t i = 0; i < nx; ++i) row[i] += f * gx[i];
        }
      }
    }
  }
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Doubles the panel count until the probe lattice settles; returns the count.
int converge_panels(const Kernel& k, const Lattice& probes, const LineSolutionOptions& opt) {
  std::vector<double> prev, cur;
  int panels = std::max(1, opt.min_panels);
  integrate_lattice(k, probes, panels, prev);
  while (panels < opt.max_panels) {
    panels *= 2;
    integrate_lattice(k, probes, panels, cur);
    const double peak = max_abs(cur);
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
    if (peak == 0.0 || diff <= opt.rel_tol * peak) return panels;
    prev.swap(cur);
  }
  std::ostringstream msg;
  msg << "line solution quadrature did not reach rel-tol " << opt.rel_tol << " with "
      << opt.max_panels << " panels";
  throw QuadratureNotConverged(msg.str());
}

}  // namespace

double LineSolution::interpolate(double x_local_um, double y_local_um, int k) const {
  if (k < 0 || k >= nz_) return 0.0;
  const double fx = (x_local_um - x0_um_) / spacing_um_;
  const double fy = (y_local_um - y0_um_) / spacing_um_;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= nx_ - 1 && fy <= ny_ - 1)) return 0.0;
  const int ix = std::min(static_cast<int>(fx), nx_ - 2);
  const int iy = std::min(static_cast<int>(fy), ny_ - 2);
  const double tx = fx - ix;
  const double ty = fy - iy;
  const double v00 = sample(ix, iy, k), v10 = sample(ix + 1, iy, k);
  const double v01 = sample(ix, iy + 1, k), v11 = sample(ix + 1, iy + 1, k);
  return (1.0 - tx) * (1.0 - ty) * v00 + tx * (1.0 - ty) * v10 + (1.0 - tx) * ty * v01 +
         tx * ty * v11;
}

double LineSolution::peak() const {
  double m = 0.0;
  for (float v : values_) m = std::max(m, static_cast<double>(v));
  return m;
}

double LineSolution::border_max() const {
  double m = 0.0;
  for (int k = 0; k < nz_; ++k) {
    for (int ix = 0; ix < nx_; ++ix) {
      m = std::max({m, std::abs(sample(ix, 0, k)), std::abs(sample(ix, ny_ - 1, k))});
    }
    for (int iy = 0; iy < ny_; ++iy) {
      m = std::max({m, std::abs(sample(0, iy, k)), std::abs(sample(nx_ - 1, iy, k))});
    }
  }
  for (int iy = 0; iy < ny_; ++iy)
    for (int ix = 0; ix < nx_; ++ix) m = std::max(m, std::abs(sample(ix, iy, nz_ - 1)));
  return m;
}

double LineSolution::heat_content(const MaterialParams& m) const {
  double sum = 0.0;
  for (float v : values_) sum += v;
  const double cell_m3 = spacing_um_ * spacing_um_ * dx_um_ * 1e-18;
  return sum * cell_m3 * volumetric_heat_capacity(m);
}

LineSolution build_line_solution(const MaterialParams& m, const LaserParams& laser,
                                 double velocity_mps, double duration_s, const GridSpec& grid,
                                 const LineSolutionOptions& opt) {
  m.validate();
  laser.validate();
  grid.validate();
  if (!(duration_s > 0.0) || !std::isfinite(duration_s))
    throw InvalidArgument("line solution duration must be > 0");
  if (!(velocity_mps >= 0.0) || !std::isfinite(velocity_mps))
    throw InvalidArgument("line solution velocity must be >= 0");
  if (opt.oversample < 1) throw InvalidArgument("oversample must be >= 1");
  int lateral_mirrors = 0;
  bool mirror_x = false, mirror_y = false;
  for (const auto& mi : opt.mirrors) {
    if (mi.axis == Mirror::Axis::X) {
      if (mirror_x) throw InvalidArgument("at most one X mirror per line solution");
      mirror_x = true;
      ++lateral_mirrors;
    } else if (mi.axis == Mirror::Axis::Y) {
      if (mirror_y) throw InvalidArgument("at most one Y mirror per line solution");
      mirror_y = true;
      ++lateral_mirrors;
    }
  }

  Kernel k;
  k.amplitude = m.absorptivity * laser.power / volumetric_heat_capacity(m) * 1e18;
  k.diff = thermal_diffusivity(m) * 1e12;
  k.sigma2 = laser.beam_sigma_um * laser.beam_sigma_um;
  k.speed = velocity_mps * 1e6;
  k.duration = duration_s;
  k.dx = grid.dx_um;
  k.sampling = opt.sampling;
  k.mirrors = opt.mirrors;

  LineSolution ls;
  ls.velocity_ = velocity_mps;
  ls.duration_ = duration_s;
  ls.variant_ = lateral_mirrors == 0 ? Variant::Interior
                : lateral_mirrors == 1 ? Variant::Edge
                                       : Variant::Corner;
  ls.sampling_ = opt.sampling;
  ls.spacing_um_ = grid.dx_um / opt.oversample;
  ls.dx_um_ = grid.dx_um;

  const double length = k.speed * duration_s;
  const double dx = grid.dx_um;
  const bool auto_size = !opt.lateral_reach_um && !opt.depth_reach_um;

  // Probe lattice along the track axis and the column under the track end:
  // the peak sits there, so it drives quadrature convergence.
  auto probe_lattice = [&](double reach_z) {
    Lattice p;
    const int n = std::max(2, static_cast<int>(std::ceil(length / ls.spacing_um_)));
    for (int i = -opt.oversample; i <= n + opt.oversample; ++i) p.xs.push_back(i * ls.spacing_um_);
    p.ys = {0.0, 0.5 * dx, dx};
    const int nzp = std::max(1, static_cast<int>(std::ceil(reach_z / dx)));
    for (int l = 0; l < nzp; ++l) p.zs.push_back((l + 0.5) * dx);
    return p;
  };

  const double spread2 = 2.0 * k.sigma2 + 4.0 * k.diff * duration_s;
  const double depth2 = 4.0 * k.diff * duration_s;

  int panels = opt.min_panels;
  double reach = dx;
  double reach_z = dx;
  if (laser.power > 0.0) {
    Lattice probes = probe_lattice(3.0 * std::sqrt(depth2) + dx);
    panels = converge_panels(k, probes, opt);
    std::vector<double> probe_vals;
    integrate_lattice(k, probes, panels, probe_vals);
    const double peak = std::max(max_abs(probe_vals), opt.border_threshold);
    const double logratio = std::max(1.0, std::log(peak / opt.border_threshold));
    reach = std::sqrt(spread2 * logratio) + dx;
    reach_z = std::sqrt(depth2 * logratio) + dx;
  }
  if (opt.lateral_reach_um) reach = *opt.lateral_reach_um;
  if (opt.depth_reach_um) reach_z = *opt.depth_reach_um;

  for (int attempt = 0;; ++attempt) {
    const int cells_back = std::max(1, static_cast<int>(std::ceil(reach / dx)));
    const double x0 = -cells_back * dx;
    const double x_end = length + cells_back * dx;
    ls.x0_um_ = x0;
    ls.y0_um_ = x0;
    ls.nx_ = static_cast<int>(std::ceil((x_end - x0) / ls.spacing_um_ - 1e-9)) + 1;
    ls.ny_ = 2 * cells_back * opt.oversample + 1;
    ls.nz_ = std::max(1, static_cast<int>(std::ceil(reach_z / dx - 1e-9)));

    Lattice lat;
    for (int i = 0; i < ls.nx_; ++i) lat.xs.push_back(ls.x_at(i));
    for (int j = 0; j < ls.ny_; ++j) lat.ys.push_back(ls.y_at(j));
    for (int l = 0; l < ls.nz_; ++l) lat.zs.push_back((l + 0.5) * dx);

    std::vector<double> acc;
    if (laser.power > 0.0) {
      integrate_lattice(k, lat, panels, acc);
    } else {
      acc.assign(lat.xs.size() * lat.ys.size() * lat.zs.size(), 0.0);
    }
    ls.values_.assign(acc.begin(), acc.end());

    const double border = ls.border_max();
    if (border < opt.border_threshold) break;
    if (!auto_size || attempt >= 6) {
      std::ostringstream msg;
      msg << "line solution window too small: border rise " << border << " K exceeds "
          << opt.border_threshold << " K";
      throw WindowTooSmall(msg.str());
    }
    if (!opt.lateral_reach_um) reach *= 1.25;
    if (!opt.depth_reach_um) reach_z *= 1.25;
  }
  return ls;
}

}  // namespace lpbf::thermal
