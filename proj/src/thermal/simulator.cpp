#include "lpbf/thermal/simulator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace lpbf::thermal {
namespace {

struct AxisImage {
  double plane = 0.0;  // lab coordinate of the mirror plane
  double sign = 1.0;
  bool reflect = false;

  double apply(double v) const { return reflect ? 2.0 * plane - v : v; }
};

struct Interval {
  double lo, hi;
};

Interval reflect(Interval in, const AxisImage& img) {
  if (!img.reflect) return in;
  return {2.0 * img.plane - in.hi, 2.0 * img.plane - in.lo};
}

bool contains(const FaceSet& set, Face f) { return std::find(set.begin(), set.end(), f) != set.end(); }

}  // namespace

void orient_and_add(TemperatureField& field, const LineSolution& ls, Vec2 start, double theta,
                    const BoundaryCondition& bc, const FaceSet& images) {
  const GridSpec& g = field.grid();
  if (!g.contains(start)) throw OutOfDomain("line solution anchor lies outside the domain");
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  // Lab-frame bounding box of the rotated window.
  const std::array<Vec2, 4> corners{
      Vec2{ls.x0_um(), ls.y0_um()}, Vec2{ls.x0_um() + ls.x_extent_um(), ls.y0_um()},
      Vec2{ls.x0_um(), ls.y0_um() + ls.y_extent_um()},
      Vec2{ls.x0_um() + ls.x_extent_um(), ls.y0_um() + ls.y_extent_um()}};
  Interval bx{1e300, -1e300}, by{1e300, -1e300};
  for (const Vec2& p : corners) {
    const double x = start.x + c * p.x - s * p.y;
    const double y = start.y + s * p.x + c * p.y;
    bx = {std::min(bx.lo, x), std::max(bx.hi, x)};
    by = {std::min(by.lo, y), std::max(by.hi, y)};
  }

  const std::array<std::pair<Face, bool>, 5> crossing{{
      {Face::XMin, bx.lo < g.x_min()},
      {Face::XMax, bx.hi > g.x_max()},
      {Face::YMin, by.lo < g.y_min()},
      {Face::YMax, by.hi > g.y_max()},
      {Face::Bottom, ls.depth_um() > g.depth()},
  }};
  for (const auto& [face, crosses] : crossing) {
    if (crosses && !contains(images, face)) {
      std::ostringstream msg;
      msg << "line solution support crosses face " << to_string(face)
          << " without an image source";
      throw OutOfDomain(msg.str());
    }
  }
  if (ls.depth_um() > 2.0 * g.depth())
    throw OutOfDomain("line solution deeper than twice the domain depth");

  std::vector<AxisImage> xi{{}}, yi{{}}, zi{{}};
  for (Face f : images) {
    const double sign = bc[f].image_sign();
    switch (f) {
      case Face::XMin: xi.push_back({g.x_min(), sign, true}); break;
      case Face::XMax: xi.push_back({g.x_max(), sign, true}); break;
      case Face::YMin: yi.push_back({g.y_min(), sign, true}); break;
      case Face::YMax: yi.push_back({g.y_max(), sign, true}); break;
      case Face::Bottom: zi.push_back({0.0, sign, true}); break;
    }
  }

  const double h = ls.spacing_um();
  const int lnz = ls.nz();
  auto values = field.values();
  const std::size_t layer = static_cast<std::size_t>(g.nx) * g.ny;

  for (const AxisImage& ix_img : xi) {
    for (const AxisImage& iy_img : yi) {
      const double lateral_sign = ix_img.sign * iy_img.sign;
      // Lab cells whose mirrored position falls inside the window.
      const Interval rx = reflect(bx, ix_img);
      const Interval ry = reflect(by, iy_img);
      const int i0 = std::max(0, static_cast<int>(std::floor((rx.lo - g.x_min()) / g.dx_um - 0.5)));
      const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil((rx.hi - g.x_min()) / g.dx_um - 0.5)));
      const int j0 = std::max(0, static_cast<int>(std::floor((ry.lo - g.y_min()) / g.dx_um - 0.5)));
      const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil((ry.hi - g.y_min()) / g.dx_um - 0.5)));
      for (int j = j0; j <= j1; ++j) {
        const double py = iy_img.apply(g.y_center(j)) - start.y;
        for (int i = i0; i <= i1; ++i) {
          const double px = ix_img.apply(g.x_center(i)) - start.x;
          const double lx = c * px + s * py;
          const double ly = -s * px + c * py;
          const double fx = (lx - ls.x0_um()) / h;
          const double fy = (ly - ls.y0_um()) / h;
          if (!(fx >= 0.0 && fy >= 0.0 && fx <= ls.nx() - 1 && fy <= ls.ny() - 1)) continue;
          const int sx = std::min(static_cast<int>(fx), ls.nx() - 2);
          const int sy = std::min(static_cast<int>(fy), ls.ny() - 2);
          const double tx = fx - sx, ty = fy - sy;
          const double w00 = (1.0 - tx) * (1.0 - ty), w10 = tx * (1.0 - ty);
          const double w01 = (1.0 - tx) * ty, w11 = tx * ty;
          const std::size_t cell = g.index(i, j, 0);
          for (const AxisImage& iz_img : zi) {
            const double sign = lateral_sign * iz_img.sign;
            for (int k = 0; k < g.nz; ++k) {
              const int kk = iz_img.reflect ? 2 * g.nz - 1 - k : k;
              if (kk < 0 || kk >= lnz) continue;
              const double v = w00 * ls.sample(sx, sy, kk) + w10 * ls.sample(sx + 1, sy, kk) +
                               w01 * ls.sample(sx, sy + 1, kk) + w11 * ls.sample(sx + 1, sy + 1, kk);
              values[cell + k * layer] += sign * v;
            }
          }
        }
      }
    }
  }
}

double excess_enthalpy(const TemperatureField& field, const MaterialParams& m) {
  double sum = 0.0;
  for (double t : field.values()) sum += t - m.ambient_temp;
  const double dx = field.grid().dx_um * kMicron;
  return sum * volumetric_heat_capacity(m) * dx * dx * dx;
}

double image_threshold_um(double diffusivity, double dt) {
  return 4.0 * std::sqrt(4.0 * diffusivity * dt) / kMicron;
}

LineSolutionCache::LineSolutionCache(const MaterialParams& m, const LaserParams& laser,
                                     const GridSpec& grid)
    : LineSolutionCache(m, laser, grid, Options{}) {}

LineSolutionCache::LineSolutionCache(const MaterialParams& m, const LaserParams& laser,
                                     const GridSpec& grid, Options options)
    : material_(m), laser_(laser), grid_(grid), options_(std::move(options)) {
  material_.validate();
  laser_.validate();
  grid_.validate();
  if (options_.velocity_resolution < 0.0)
    throw InvalidArgument("velocity_resolution must be >= 0");
}

LineSolutionCache::Key LineSolutionCache::key_for(double velocity, double length_um) const {
  Key key{};
  if (options_.velocity_resolution > 0.0) {
    key.velocity_bin = std::llround(std::log(velocity) / std::log1p(options_.velocity_resolution));
  } else {
    key.velocity_bin = static_cast<std::int64_t>(std::bit_cast<std::uint64_t>(velocity));
  }
  key.length_nm = std::llround(length_um * 1000.0);
  return key;
}

double LineSolutionCache::bin_velocity(std::int64_t bin) const {
  if (options_.velocity_resolution > 0.0)
    return std::exp(static_cast<double>(bin) * std::log1p(options_.velocity_resolution));
  return std::bit_cast<double>(static_cast<std::uint64_t>(bin));
}

double LineSolutionCache::quantize(double velocity) const {
  if (!(velocity > 0.0) || !std::isfinite(velocity))
    throw InvalidArgument("velocity must be > 0");
  return bin_velocity(key_for(velocity, 0.0).velocity_bin);
}

std::shared_ptr<const LineSolution> LineSolutionCache::get(double velocity, double length_um) {
  if (!(length_um > 0.0)) throw InvalidArgument("step length must be > 0");
  const Key key = key_for(velocity, length_um);
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  const double v = bin_velocity(key.velocity_bin);
  const double len = static_cast<double>(key.length_nm) / 1000.0;
  auto built = std::make_shared<const LineSolution>(
      build_line_solution(material_, laser_, v, len * kMicron / v, grid_, options_.solution));

  std::unique_lock lock(mutex_);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  entries_.emplace(key, built);
  order_.push_back(key);
  bytes_ += built->bytes();
  while (bytes_ > options_.max_bytes && order_.size() > 1) {
    auto it = entries_.find(order_.front());
    bytes_ -= it->second->bytes();
    entries_.erase(it);
    order_.pop_front();
  }
  return built;
}

std::size_t LineSolutionCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t LineSolutionCache::bytes() const {
  std::shared_lock lock(mutex_);
  return bytes_;
}

Simulator::Simulator(const MaterialParams& m, const LaserParams& laser, const GridSpec& grid,
                     const BoundaryCondition& bc, std::shared_ptr<LineSolutionCache> cache)
    : material_(m), laser_(laser), grid_(grid), bc_(bc), cache_(std::move(cache)) {
  material_.validate();
  laser_.validate();
  grid_.validate();
  bc_.validate();
  if (!cache_) cache_ = std::make_shared<LineSolutionCache>(m, laser, grid);
  if (!(cache_->material() == material_) || !(cache_->laser() == laser_) ||
      cache_->dx_um() != grid_.dx_um)
    throw InvalidArgument("line solution cache was built for different physics");
}

DiffusionKernel Simulator::kernel_for(double dt) const {
  return build_diffusion_kernel(thermal_diffusivity(material_), dt, grid_.dx_um);
}

FaceSet Simulator::select_images(const LineSolution& ls, Vec2 start, Vec2 end, double theta,
                                 double dt) const {
  const double reach = image_threshold_um(thermal_diffusivity(material_), dt);
  const double c = std::cos(theta), s = std::sin(theta);
  double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
  for (double lx : {ls.x0_um(), ls.x0_um() + ls.x_extent_um()}) {
    for (double ly : {ls.y0_um(), ls.y0_um() + ls.y_extent_um()}) {
      const double x = start.x + c * lx - s * ly;
      const double y = start.y + s * lx + c * ly;
      bx0 = std::min(bx0, x);
      bx1 = std::max(bx1, x);
      by0 = std::min(by0, y);
      by1 = std::max(by1, y);
    }
  }
  const double seg_x0 = std::min(start.x, end.x), seg_x1 = std::max(start.x, end.x);
  const double seg_y0 = std::min(start.y, end.y), seg_y1 = std::max(start.y, end.y);
  FaceSet faces;
  if (seg_x0 - grid_.x_min() < reach || bx0 < grid_.x_min()) faces.push_back(Face::XMin);
  if (grid_.x_max() - seg_x1 < reach || bx1 > grid_.x_max()) faces.push_back(Face::XMax);
  if (seg_y0 - grid_.y_min() < reach || by0 < grid_.y_min()) faces.push_back(Face::YMin);
  if (grid_.y_max() - seg_y1 < reach || by1 > grid_.y_max()) faces.push_back(Face::YMax);
  if (grid_.depth() < reach || ls.depth_um() > grid_.depth()) faces.push_back(Face::Bottom);
  return faces;
}

StepResult Simulator::advance(TemperatureField& field, Vec2 start, Vec2 end, double velocity) const {
  if (!(field.grid() == grid_)) throw InvalidArgument("field grid does not match simulator grid");
  if (!(velocity > 0.0) || !std::isfinite(velocity))
    throw InvalidArgument("advance needs velocity > 0");
  if (!grid_.contains(start) || !grid_.contains(end))
    throw OutOfDomain("segment leaves the domain");
  const double length = distance(start, end);
  if (!(length > 0.0)) throw InvalidArgument("segment has zero length");

  auto ls = cache_->get(velocity, length);
  StepResult out;
  out.velocity = ls->velocity();
  out.dt = ls->duration();
  diffuse(field, kernel_for(out.dt), bc_);

  const double theta = std::atan2(end.y - start.y, end.x - start.x);
  out.images = select_images(*ls, start, end, theta, out.dt);
  int lateral_x = 0, lateral_y = 0;
  for (Face f : out.images) {
    if (f == Face::XMin || f == Face::XMax) lateral_x = 1;
    if (f == Face::YMin || f == Face::YMax) lateral_y = 1;
  }
  out.variant = lateral_x + lateral_y == 0   ? Variant::Interior
                : lateral_x + lateral_y == 1 ? Variant::Edge
                                             : Variant::Corner;
  orient_and_add(field, *ls, start, theta, bc_, out.images);
  return out;
}

}  // namespace lpbf::thermal
