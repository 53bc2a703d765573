#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lpbf/scanpath/scanpath.hpp"

using namespace lpbf;
using namespace lpbf::scanpath;

namespace {

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Proper intersection of two closed segments (shared endpoints count).
bool intersects(const Segment& s, const Segment& t) {
  const Vec2 r = s.end - s.start, q = t.end - t.start;
  const double den = cross(r, q);
  if (std::abs(den) < 1e-12) return false;
  const double a = cross(t.start - s.start, q) / den;
  const double b = cross(t.start - s.start, r) / den;
  return a >= -1e-12 && a <= 1 + 1e-12 && b >= -1e-12 && b <= 1 + 1e-12;
}

double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

}  // namespace

TEST_CASE("ten-row cross hatch has the expected lased length") {
  auto p = cross_hatch(1250.0, 125.0, 10);
  int passes = 0;
  for (const auto& s : p.segments())
    if (std::abs(s.length - 1250.0) < 1e-9) ++passes;
  CHECK(passes == 10);
  CHECK(p.segments().size() == 19);
  CHECK(p.total_length() == doctest::Approx(13625.0).epsilon(1e-12));
  CHECK(p.turnarounds().size() == 18);
}

TEST_CASE("single-row hatch is one straight segment") {
  auto p = cross_hatch(1250.0, 125.0, 1);
  REQUIRE(p.segments().size() == 1);
  CHECK(p.segments()[0].length == doctest::Approx(1250.0));
  CHECK(p.segments()[0].heading == doctest::Approx(0.0));
}

TEST_CASE("consecutive hatch passes run in opposite directions") {
  auto p = cross_hatch(1250.0, 125.0, 10);
  const auto& s = p.segments();
  for (std::size_t i = 2; i < s.size(); i += 2)
    CHECK(std::abs(std::abs(wrap(s[i].heading - s[i - 2].heading)) - kPi) < 1e-12);
  for (std::size_t i = 1; i < s.size(); i += 2) CHECK(s[i].heading == doctest::Approx(kPi / 2));
}

TEST_CASE("hatch taller than the domain overflows") {
  CHECK_THROWS_AS(cross_hatch(1250.0, 125.0, 12), DomainOverflow);
}

TEST_CASE("triangle legs shrink geometrically from a horizontal start") {
  auto p = concentric_triangles({});
  const auto& s = p.segments();
  REQUIRE(s.size() >= 3);
  CHECK(s[0].length == doctest::Approx(937.5));
  CHECK(s[1].length == doctest::Approx(703.125));
  CHECK(s[2].length == doctest::Approx(527.34375));
  CHECK(s[0].heading == doctest::Approx(0.0));
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i].length == doctest::Approx(0.75 * s[i - 1].length));
    // interior angle between the reversed previous leg and this leg
    const double turn = std::abs(wrap(s[i].heading - s[i - 1].heading));
    CHECK(kPi - turn == doctest::Approx(kPi / 3));
  }
}

TEST_CASE("triangle leg count follows the closed form") {
  TriangleSpec tri;
  auto p = concentric_triangles(tri);
  const int expected =
      static_cast<int>(std::floor(std::log(50.0 / (0.75 * 1250.0)) / std::log(0.75))) + 1;
  CHECK(static_cast<int>(p.segments().size()) == expected);
  CHECK(expected == 11);
}

TEST_CASE("triangle spiral does not cross itself") {
  auto p = concentric_triangles({});
  const auto& s = p.segments();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 2; j < s.size(); ++j) CHECK_FALSE(intersects(s[i], s[j]));
}

TEST_CASE("every control point stays inside the domain") {
  for (const auto& p : {cross_hatch(1250.0, 125.0, 10), concentric_triangles({})})
    for (const auto& c : p.controls())
      for (Vec2 q : {c.start, c.end}) {
        CHECK(q.x >= -1e-9);
        CHECK(q.x <= 1250.0 + 1e-9);
        CHECK(q.y >= -1e-9);
        CHECK(q.y <= 1250.0 + 1e-9);
      }
}

TEST_CASE("triangle that leaves the domain overflows") {
  TriangleSpec tri;
  tri.start = Vec2{600.0, 100.0};
  CHECK_THROWS_AS(concentric_triangles(tri), DomainOverflow);
}

TEST_CASE("exact multiples split into full intervals") {
  auto c = segment_controls({Segment::between({0, 0}, {1250, 0})});
  CHECK(c.size() == 25);
  for (const auto& ci : c) CHECK(ci.length == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("remainder is kept as a short final interval") {
  auto c = segment_controls({Segment::between({0, 0}, {937.5, 0})});
  REQUIRE(c.size() == 19);
  for (int i = 0; i < 18; ++i) CHECK(c[i].length == doctest::Approx(50.0));
  CHECK(c[18].length == doctest::Approx(37.5));
  double total = 0.0;
  for (const auto& ci : c) total += ci.length;
  CHECK(total == doctest::Approx(937.5).epsilon(1e-14));
}

TEST_CASE("control intervals partition each segment") {
  for (const auto& p : {cross_hatch(1250.0, 125.0, 10), concentric_triangles({})}) {
    const auto& segs = p.segments();
    const auto& ctl = p.controls();
    double total = 0.0;
    for (std::size_t i = 0; i < ctl.size(); ++i) {
      const auto& seg = segs[ctl[i].segment];
      total += ctl[i].length;
      CHECK(ctl[i].heading == doctest::Approx(seg.heading));
      if (ctl[i].index == 0) {
        CHECK(distance(ctl[i].start, seg.start) < 1e-9);
      } else {
        CHECK(distance(ctl[i].start, ctl[i - 1].end) < 1e-9);
      }
      const bool last = i + 1 == ctl.size() || ctl[i + 1].segment != ctl[i].segment;
      if (last) CHECK(distance(ctl[i].end, seg.end) < 1e-9);
    }
    CHECK(total == doctest::Approx(p.total_length()).epsilon(1e-12));
  }
}

TEST_CASE("translation shifts every point") {
  auto p = cross_hatch(500.0, 100.0, 3);
  auto q = p.translated({10.0, -5.0});
  REQUIRE(q.controls().size() == p.controls().size());
  CHECK(q.controls()[3].start.x == doctest::Approx(p.controls()[3].start.x + 10.0));
  CHECK(q.segments()[1].end.y == doctest::Approx(p.segments()[1].end.y - 5.0));
}

TEST_CASE("path csv lists every control interval") {
  auto p = cross_hatch(1250.0, 125.0, 2);
  std::stringstream ss;
  write_path_csv(ss, p);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "seg_idx,ctrl_idx,x0_um,y0_um,x1_um,y1_um,heading_rad,len_um");
  std::size_t rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == p.controls().size());
}
