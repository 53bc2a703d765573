#include "lpbf/meltpool/meltpool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace lpbf::meltpool {
namespace {

/// Vertex offset (in cells, clamped to half a cell) and value of the parabola
/// through (-1, a), (0, b), (1, c).
std::pair<double, double> parabola_vertex(double a, double b, double c) {
  const double curv = a - 2.0 * b + c;
  if (!(curv < 0.0)) return {0.0, b};
  const double off = std::clamp(0.5 * (a - c) / curv, -0.5, 0.5);
  return {off, b + 0.5 * off * (c - a) + 0.5 * curv * off * off};
}

}  // namespace

SurfacePeak surface_peak(const thermal::TemperatureField& field, Vec2 hint) {
  const auto& g = field.grid();
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  int bi = 0, bj = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double t = field.at(i, j, 0);
      lo = std::min(lo, t);
      const double d = distance({g.x_center(i), g.y_center(j)}, hint);
      if (t > hi || (t == hi && d < best_dist)) {
        hi = t;
        bi = i;
        bj = j;
        best_dist = d;
      }
    }
  }
  if (hi == lo) return {hint, hi};

  double ox = 0.0, oy = 0.0, peak = hi;
  if (bi > 0 && bi < g.nx - 1) {
    auto [off, val] = parabola_vertex(field.at(bi - 1, bj, 0), hi, field.at(bi + 1, bj, 0));
    ox = off;
    peak += val - hi;
  }
  if (bj > 0 && bj < g.ny - 1) {
    auto [off, val] = parabola_vertex(field.at(bi, bj - 1, 0), hi, field.at(bi, bj + 1, 0));
    oy = off;
    peak += val - hi;
  }
  return {{g.x_center(bi) + ox * g.dx_um, g.y_center(bj) + oy * g.dx_um}, peak};
}

std::vector<double> column_at(const thermal::TemperatureField& field, Vec2 p) {
  const auto& g = field.grid();
  const double fx = std::clamp((p.x - g.x_min()) / g.dx_um - 0.5, 0.0, g.nx - 1.0);
  const double fy = std::clamp((p.y - g.y_min()) / g.dx_um - 0.5, 0.0, g.ny - 1.0);
  const int i = std::min(static_cast<int>(fx), g.nx - 2);
  const int j = std::min(static_cast<int>(fy), g.ny - 2);
  const double tx = fx - i, ty = fy - j;
  std::vector<double> col(static_cast<std::size_t>(g.nz));
  for (int k = 0; k < g.nz; ++k) {
    col[static_cast<std::size_t>(k)] =
        (1 - tx) * (1 - ty) * field.at(i, j, k) + tx * (1 - ty) * field.at(i + 1, j, k) +
        (1 - tx) * ty * field.at(i, j + 1, k) + tx * ty * field.at(i + 1, j + 1, k);
  }
  return col;
}

double column_melt_depth(const std::vector<double>& col, double dz, double melt_temp) {
  if (col.empty() || !(col[0] > melt_temp)) return 0.0;
  const int n = static_cast<int>(col.size());
  int deepest = 0;
  for (int k = n - 1; k >= 0; --k) {
    if (col[static_cast<std::size_t>(k)] > melt_temp) {
      deepest = k;
      break;
    }
  }
  if (deepest == n - 1) return n * dz;

  // Bisection on the linear piece between layer centres, then one
  // interpolation step inside the final bracket.
  const double z0 = (deepest + 0.5) * dz;
  const double t0 = col[static_cast<std::size_t>(deepest)];
  const double t1 = col[static_cast<std::size_t>(deepest + 1)];
  auto temp_at = [&](double z) { return t0 + (t1 - t0) * (z - z0) / dz; };
  double a = z0, b = z0 + dz;
  while (b - a > 0.01 * dz) {
    const double mid = 0.5 * (a + b);
    if (temp_at(mid) > melt_temp) a = mid;
    else b = mid;
  }
  const double ta = temp_at(a), tb = temp_at(b);
  return ta == tb ? a : a + (ta - melt_temp) / (ta - tb) * (b - a);
}

double melt_depth(const thermal::TemperatureField& field, const thermal::MaterialParams& m,
                  Vec2 hint) {
  return measure(field, m, hint, 0.0).depth_um;
}

MeltDepthSample measure(const thermal::TemperatureField& field, const thermal::MaterialParams& m,
                        Vec2 laser, double time_s) {
  const SurfacePeak peak = surface_peak(field, laser);
  MeltDepthSample s;
  s.time_s = time_s;
  s.laser_um = laser;
  s.peak_temp = peak.temperature;
  if (peak.temperature > m.melt_temp) {
    auto col = column_at(field, peak.position_um);
    col[0] = std::max(col[0], peak.temperature);
    s.depth_um = column_melt_depth(col, field.grid().dx_um, m.melt_temp);
  }
  return s;
}

void MeltDepthTrace::push_back(const MeltDepthSample& s) {
  if (!samples_.empty() && !(s.time_s > samples_.back().time_s))
    throw InvalidArgument("melt depth trace times must strictly increase");
  samples_.push_back(s);
}

std::vector<double> MeltDepthTrace::depths() const {
  std::vector<double> d;
  d.reserve(samples_.size());
  for (const auto& s : samples_) d.push_back(s.depth_um);
  return d;
}

double MeltDepthTrace::max_depth() const {
  double m = 0.0;
  for (const auto& s : samples_) m = std::max(m, s.depth_um);
  return m;
}

double MeltDepthTrace::min_depth() const {
  if (samples_.empty()) return 0.0;
  double m = samples_.front().depth_um;
  for (const auto& s : samples_) m = std::min(m, s.depth_um);
  return m;
}

void write_trace_csv(std::ostream& out, const MeltDepthTrace& trace) {
  out << "t_s,x_um,y_um,depth_um,peak_K\n" << std::setprecision(12);
  for (const auto& s : trace.samples())
    out << s.time_s << ',' << s.laser_um.x << ',' << s.laser_um.y << ',' << s.depth_um << ','
        << s.peak_temp << '\n';
}

void write_trace_csv(const std::filesystem::path& path, const MeltDepthTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  write_trace_csv(out, trace);
}

}  // namespace lpbf::meltpool
