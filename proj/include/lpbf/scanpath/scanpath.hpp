#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lpbf/common.hpp"

namespace lpbf::scanpath {

class DomainOverflow : public Error {
 public:
  using Error::Error;
};

/// Straight lased piece of a trajectory; coordinates in um.
struct Segment {
  Vec2 start;
  Vec2 end;
  double heading = 0.0;  // rad, direction of end - start
  double length = 0.0;   // um

  static Segment between(Vec2 a, Vec2 b);
};

/// One action step: a piece of a single segment, nominally 50 um long.
struct ControlInterval {
  int segment = 0;
  int index = 0;  // position within its segment
  Vec2 start;
  Vec2 end;
  double heading = 0.0;
  double length = 0.0;
};

/// Ordered segments together with their control subdivision.
class ScanPath {
 public:
  ScanPath() = default;
  ScanPath(std::vector<Segment> segments, double interval_um);

  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<ControlInterval>& controls() const { return controls_; }
  double interval_um() const { return interval_um_; }
  double total_length() const;

  /// Vertices where the heading changes.
  std::vector<Vec2> turnarounds() const;

  /// Returns a copy with every point shifted by `offset`.
  ScanPath translated(Vec2 offset) const;

 private:
  std::vector<Segment> segments_;
  std::vector<ControlInterval> controls_;
  double interval_um_ = 50.0;
};

/// Splits each segment into ceil(length / interval) pieces: full intervals
/// followed by one shorter remainder when the length is not a multiple.
std::vector<ControlInterval> segment_controls(const std::vector<Segment>& segments,
                                              double interval_um = 50.0);

/// Serpentine in [0, L]^2: `rows` passes of length L alternating +x / -x,
/// joined by lased +y jogs of `hatch`. Rows are centred vertically.
ScanPath cross_hatch(double length_um, double hatch_um, int rows, double interval_um = 50.0);

struct TriangleSpec {
  double domain_um = 1250.0;
  double first_fraction = 0.75;
  double shrink = 0.75;
  double interior_angle_deg = 60.0;  // angle between consecutive segments
  double min_length_um = 50.0;
  /// Start point; defaults to ((1 - f) L / 2, (1 - f) L / 2).
  std::optional<Vec2> start;
};

/// Inward triangular spiral: first leg horizontal of length f L, each next leg
/// r times the previous, turning left so consecutive legs meet at the interior
/// angle. Stops before a leg would be shorter than min_length.
ScanPath concentric_triangles(const TriangleSpec& tri, double interval_um = 50.0);

/// CSV `seg_idx,ctrl_idx,x0_um,y0_um,x1_um,y1_um,heading_rad,len_um`.
void write_path_csv(std::ostream& out, const ScanPath& path);
void write_path_csv(const std::filesystem::path& file, const ScanPath& path);

}  // namespace lpbf::scanpath
