#include "lpbf/env/observation.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace lpbf::env {

using thermal::Face;

int ObservationSpec::cells_per_side(double dx_um) const {
  return static_cast<int>(std::lround(window_um / dx_um));
}

std::size_t ObservationSpec::size(double dx_um) const {
  const auto n = static_cast<std::size_t>(cells_per_side(dx_um));
  return static_cast<std::size_t>(history) * kPlanes * n * n;
}

void ObservationSpec::validate(double dx_um) const {
  if (!(window_um > 0.0)) throw InvalidArgument("observation window must be > 0");
  if (history < 1) throw InvalidArgument("observation history must be >= 1");
  const double cells = window_um / dx_um;
  if (std::abs(cells - std::round(cells)) > 1e-9 || std::lround(cells) < 1) {
    std::ostringstream msg;
    msg << "observation window " << window_um << " um is not a whole number of " << dx_um
        << " um cells";
    throw InvalidArgument(msg.str());
  }
}

namespace {

// Cell value with out-of-range indices folded back across the faces.
double padded(const thermal::TemperatureField& f, const thermal::BoundaryCondition& bc, int i,
              int j, int k) {
  const auto& g = f.grid();
  if (i < 0) return bc[Face::XMin].ghost(padded(f, bc, -1 - i, j, k));
  if (i >= g.nx) return bc[Face::XMax].ghost(padded(f, bc, 2 * g.nx - 1 - i, j, k));
  if (j < 0) return bc[Face::YMin].ghost(padded(f, bc, i, -1 - j, k));
  if (j >= g.ny) return bc[Face::YMax].ghost(padded(f, bc, i, 2 * g.ny - 1 - j, k));
  if (k >= g.nz) return bc[Face::Bottom].ghost(padded(f, bc, i, j, 2 * g.nz - 1 - k));
  return f.at(i, j, k);
}

double lateral(const thermal::TemperatureField& f, const thermal::BoundaryCondition& bc, double x,
               double y, int k) {
  const auto& g = f.grid();
  const double fx = (x - g.x_min()) / g.dx_um - 0.5;
  const double fy = (y - g.y_min()) / g.dx_um - 0.5;
  const int i = static_cast<int>(std::floor(fx));
  const int j = static_cast<int>(std::floor(fy));
  const double tx = fx - i, ty = fy - j;
  double v = 0.0;
  if (tx < 1.0 && ty < 1.0) v += (1 - tx) * (1 - ty) * padded(f, bc, i, j, k);
  if (tx > 0.0 && ty < 1.0) v += tx * (1 - ty) * padded(f, bc, i + 1, j, k);
  if (tx < 1.0 && ty > 0.0) v += (1 - tx) * ty * padded(f, bc, i, j + 1, k);
  if (tx > 0.0 && ty > 0.0) v += tx * ty * padded(f, bc, i + 1, j + 1, k);
  return v;
}

}  // namespace

PlaneMaps observe(const thermal::TemperatureField& field, Vec2 laser, const ObservationSpec& layout,
                  const thermal::BoundaryCondition& bc) {
  const auto& g = field.grid();
  const int n = layout.cells_per_side(g.dx_um);
  std::vector<double> offs(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) offs[m] = (m - 0.5 * (n - 1)) * g.dx_um;

  PlaneMaps out;
  for (auto& map : out.maps) map.resize(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t at = static_cast<std::size_t>(r) * n + c;
      out.maps[0][at] = lateral(field, bc, laser.x + offs[c], laser.y + offs[r], 0);
      out.maps[1][at] = lateral(field, bc, laser.x + offs[c], laser.y, r);
      out.maps[2][at] = lateral(field, bc, laser.x, laser.y + offs[c], r);
    }
  }
  return out;
}

std::vector<double> whiten(const std::vector<double>& raw, double std_floor) {
  if (raw.empty()) return {};
  const double n = static_cast<double>(raw.size());
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  double var = 0.0;
  for (double v : raw) var += (v - mean) * (v - mean);
  const double sd = std::max(std::sqrt(var / n), std_floor);
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mean) / sd;
  return out;
}

std::vector<double> flatten(const std::vector<PlaneMaps>& history) {
  std::vector<double> out;
  for (const auto& set : history)
    for (const auto& map : set.maps) out.insert(out.end(), map.begin(), map.end());
  return out;
}

}  // namespace lpbf::env
