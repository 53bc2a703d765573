#include "lpbf/scanpath/scanpath.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lpbf::scanpath {
namespace {

constexpr double kTurnTol = 1e-9;

bool inside(Vec2 p, double lo, double hi) {
  constexpr double eps = 1e-9;
  return p.x >= lo - eps && p.x <= hi + eps && p.y >= lo - eps && p.y <= hi + eps;
}

}  // namespace

Segment Segment::between(Vec2 a, Vec2 b) {
  Segment s{a, b, std::atan2(b.y - a.y, b.x - a.x), distance(a, b)};
  if (!(s.length > 0.0)) throw InvalidArgument("segment must have positive length");
  return s;
}

std::vector<ControlInterval> segment_controls(const std::vector<Segment>& segments,
                                              double interval) {
  if (!(interval > 0.0)) throw InvalidArgument("control interval must be > 0");
  std::vector<ControlInterval> out;
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const Segment& s = segments[si];
    const int n = std::max(1, static_cast<int>(std::ceil(s.length / interval - 1e-9)));
    const Vec2 dir{(s.end.x - s.start.x) / s.length, (s.end.y - s.start.y) / s.length};
    Vec2 prev = s.start;
    double prev_d = 0.0;
    for (int c = 0; c < n; ++c) {
      const bool last = c == n - 1;
      const double d = last ? s.length : (c + 1) * interval;
      const Vec2 next = last ? s.end : s.start + d * dir;
      out.push_back({static_cast<int>(si), c, prev, next, s.heading, d - prev_d});
      prev = next;
      prev_d = d;
    }
  }
  return out;
}

ScanPath::ScanPath(std::vector<Segment> segments, double interval)
    : segments_(std::move(segments)), interval_um_(interval) {
  for (std::size_t i = 1; i < segments_.size(); ++i)
    if (distance(segments_[i - 1].end, segments_[i].start) > 1e-9)
      throw InvalidArgument("scan path segments must be contiguous");
  controls_ = segment_controls(segments_, interval);
}

double ScanPath::total_length() const {
  double sum = 0.0;
  for (const auto& s : segments_) sum += s.length;
  return sum;
}

std::vector<Vec2> ScanPath::turnarounds() const {
  std::vector<Vec2> pts;
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    const double d = std::remainder(segments_[i].heading - segments_[i - 1].heading, 2.0 * kPi);
    if (std::abs(d) > kTurnTol) pts.push_back(segments_[i].start);
  }
  return pts;
}

ScanPath ScanPath::translated(Vec2 offset) const {
  std::vector<Segment> segs = segments_;
  for (auto& s : segs) {
    s.start = s.start + offset;
    s.end = s.end + offset;
  }
  return ScanPath(std::move(segs), interval_um_);
}

ScanPath cross_hatch(double length, double hatch, int rows, double interval) {
  if (!(length > 0.0) || !(hatch > 0.0) || rows < 1)
    throw InvalidArgument("cross hatch needs L > 0, h > 0 and rows >= 1");
  const double span = (rows - 1) * hatch;
  if (span > length) {
    std::ostringstream msg;
    msg << rows << " rows at " << hatch << " um spacing need " << span << " um, domain is "
        << length << " um";
    throw DomainOverflow(msg.str());
  }
  const double y0 = 0.5 * (length - span);
  std::vector<Segment> segs;
  for (int r = 0; r < rows; ++r) {
    const double y = y0 + r * hatch;
    const bool forward = r % 2 == 0;
    const Vec2 a{forward ? 0.0 : length, y};
    const Vec2 b{forward ? length : 0.0, y};
    segs.push_back(Segment::between(a, b));
    if (r + 1 < rows) segs.push_back(Segment::between(b, {b.x, y + hatch}));
  }
  return ScanPath(std::move(segs), interval);
}

ScanPath concentric_triangles(const TriangleSpec& tri, double interval) {
  const double L = tri.domain_um;
  if (!(L > 0.0) || !(tri.first_fraction > 0.0) || tri.first_fraction > 1.0)
    throw InvalidArgument("triangle path needs L > 0 and 0 < f <= 1");
  if (!(tri.shrink > 0.0 && tri.shrink < 1.0))
    throw InvalidArgument("triangle shrink ratio must lie in (0, 1)");
  if (!(tri.interior_angle_deg > 0.0 && tri.interior_angle_deg < 180.0))
    throw InvalidArgument("interior angle must lie in (0, 180) degrees");
  if (!(tri.min_length_um >= interval))
    throw InvalidArgument("min segment length must cover one control interval");

  const double margin = 0.5 * (1.0 - tri.first_fraction) * L;
  Vec2 p = tri.start.value_or(Vec2{margin, margin});
  const double turn = kPi - tri.interior_angle_deg * kPi / 180.0;
  const double first = tri.first_fraction * L;
  double len = first;
  double heading = 0.0;
  std::vector<Segment> segs;
  if (!inside(p, 0.0, L)) throw DomainOverflow("triangle start lies outside the domain");
  while (len >= tri.min_length_um) {
    const Vec2 q = p + len * Vec2{std::cos(heading), std::sin(heading)};
    if (!inside(q, 0.0, L)) {
      std::ostringstream msg;
      msg << "triangle leg " << segs.size() << " ends at (" << q.x << ", " << q.y
          << ") outside [0, " << L << "]^2";
      throw DomainOverflow(msg.str());
    }
    segs.push_back(Segment::between(p, q));
    p = q;
    heading = std::remainder(heading + turn, 2.0 * kPi);
    len = first * std::pow(tri.shrink, static_cast<double>(segs.size()));
  }
  if (segs.empty()) throw InvalidArgument("first triangle leg is shorter than min length");
  return ScanPath(std::move(segs), interval);
}

void write_path_csv(std::ostream& out, const ScanPath& path) {
  out << "seg_idx,ctrl_idx,x0_um,y0_um,x1_um,y1_um,heading_rad,len_um\n" << std::setprecision(12);
  for (const auto& c : path.controls())
    out << c.segment << ',' << c.index << ',' << c.start.x << ',' << c.start.y << ',' << c.end.x
        << ',' << c.end.y << ',' << c.heading << ',' << c.length << '\n';
}

void write_path_csv(const std::filesystem::path& file, const ScanPath& path) {
  std::ofstream out(file);
  if (!out) throw Error("cannot open " + file.string());
  write_path_csv(out, path);
}

}  // namespace lpbf::scanpath
