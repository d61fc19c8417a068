#include "doctest.h"

#include "binn/benchmarks.hpp"
#include "binn/geometry.hpp"
#include "binn/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace binn;

namespace {
constexpr double kPi = std::numbers::pi;

Boundary circle(double r, int n, bool cw) {
  return build_boundary({{LoopSpec{{circle_piece(Vec2::Zero(), r, n, cw)}, true}}});
}
}  // namespace

TEST_CASE("unit circle partition") {
  const Boundary b = circle(1.0, 40, false);
  REQUIRE(b.size() == 40);
  for (const auto& s : b.segments) {
    CHECK(std::abs(s.half_arc() - kPi / 40.0) < 1e-15);
    CHECK(std::holds_alternative<ArcPiece>(s.curve));
  }
  CHECK(std::abs(b.length() - 2.0 * kPi) < 1e-12);
}

TEST_CASE("flower and contact patch partitions") {
  const Benchmark f = make_flower();
  CHECK(f.potential.boundary.size() == 100);
  CHECK(std::abs(f.potential.boundary.length() - 5.0 * kPi) < 1e-12);
  const Benchmark h = make_hertz();
  REQUIRE(h.elastic.boundary.size() == 20);
  for (const auto& s : h.elastic.boundary.segments) CHECK(std::abs(s.length() - 0.1) < 1e-14);
}

TEST_CASE("segment points") {
  const Segment s{LinePiece{{0.0, 0.0}, {2.0, 0.0}}, 0, {}};
  const SegmentPoint p = s.at(0.0);
  CHECK((p.x - Vec2(1.0, 0.0)).norm() < 1e-15);
  CHECK(p.jacobian == doctest::Approx(1.0));
  CHECK((p.normal - Vec2(0.0, -1.0)).norm() < 1e-15);
  CHECK(segment_point(s, 0.5).x.x() == doctest::Approx(1.5));

  const Boundary in = circle(1.0, 16, false);
  const Boundary out = circle(1.0, 16, true);
  for (double xi : {-1.0, -0.3, 0.0, 0.8}) {
    const auto& si = in.segments[3];
    const SegmentPoint q = si.at(xi);
    CHECK((q.normal - q.x).norm() < 1e-14);
    CHECK(std::abs(q.jacobian - si.half_arc()) < 1e-15);
    const SegmentPoint e = out.segments[5].at(xi);
    CHECK((e.normal + e.x).norm() < 1e-14);
  }
}

TEST_CASE("closed-loop quadrature identities") {
  const auto rule = gauss_legendre(10);
  for (const Boundary& b : {circle(2.5, 24, false), make_flower().potential.boundary,
                            make_beam().elastic.boundary}) {
    double n1 = 0.0, n2 = 0.0, len = 0.0;
    for (const auto& s : b.segments) {
      n1 += integrate_regular(s, rule, [](const SegmentPoint& p) { return p.normal.x(); });
      n2 += integrate_regular(s, rule, [](const SegmentPoint& p) { return p.normal.y(); });
      len += integrate_regular(s, rule, [](const SegmentPoint&) { return 1.0; });
      for (double xi : rule.nodes) {
        const SegmentPoint p = s.at(xi);
        CHECK(std::abs(p.normal.dot(s.tangent(xi)) / p.jacobian) < 1e-12);
        CHECK(std::abs(p.normal.norm() - 1.0) < 1e-14);
      }
    }
    CHECK(std::abs(n1) < 1e-10);
    CHECK(std::abs(n2) < 1e-10);
    CHECK(std::abs(len - b.length()) < 1e-10);
  }
  CHECK(std::abs(circle(2.5, 24, false).length() - 5.0 * kPi) < 1e-10);
}

TEST_CASE("loops chain continuously") {
  for (const Boundary& b : {make_flower().potential.boundary, make_beam().elastic.boundary,
                            make_inclusion(10, false).elastic.boundary}) {
    for (const auto& loop : b.loops) {
      for (std::size_t i = 0; i < loop.count; ++i) {
        const auto& a = b.segments[loop.first + i];
        const auto& next = b.segments[loop.first + (i + 1) % loop.count];
        CHECK((a.end() - next.start()).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("degenerate geometry is rejected") {
  CHECK_THROWS_AS(build_boundary({{LoopSpec{{line_piece({0, 0}, {0, 0}, 4)}, false}}}), GeometryError);
  CHECK_THROWS_AS(build_boundary({{LoopSpec{{circle_piece(Vec2::Zero(), 0.0, 8, false)}, true}}}),
                  GeometryError);
  CHECK_THROWS_AS(build_boundary({{LoopSpec{{line_piece({0, 0}, {1, 0}, 0)}, false}}}), GeometryError);
}

TEST_CASE("refinement splits every segment in order") {
  const Boundary b = circle(1.0, 8, false);
  const Boundary r = b.refined(3);
  REQUIRE(r.size() == 24);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK((r.segments[3 * i].start() - b.segments[i].start()).norm() < 1e-14);
    CHECK((r.segments[3 * i + 2].end() - b.segments[i].end()).norm() < 1e-14);
    CHECK(std::abs(r.segments[3 * i + 1].half_arc() - b.segments[i].half_arc() / 3.0) < 1e-15);
  }
  CHECK(std::abs(r.length() - b.length()) < 1e-12);
}

TEST_CASE("trajectory sampling and containment") {
  const Boundary b = circle(1.0, 10, false);
  const auto t = trajectory(b, 100);
  REQUIRE(t.size() == 100);
  CHECK(t.front().s == doctest::Approx(kPi / 100.0));
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i].s > t[i - 1].s);
  CHECK(winding_number(b, Vec2(0.2, 0.1)) == 1);
  CHECK(winding_number(b, Vec2(1.5, 0.0)) == 0);
  CHECK(winding_number(circle(1.0, 10, true), Vec2(0.0, 0.0)) == -1);
  CHECK(b.distance_to(Vec2(0.0, 0.5)) == doctest::Approx(0.5));
}
