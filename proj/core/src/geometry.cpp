#include "binn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace binn {

namespace {

constexpr double kChainTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

double distance_to_line(const LinePiece& line, const Vec2& p) {
  const Vec2 d = line.end - line.start;
  const double len2 = d.squaredNorm();
  const double s = std::clamp((p - line.start).dot(d) / len2, 0.0, 1.0);
  return (line.start + s * d - p).norm();
}

double distance_to_arc(const ArcPiece& arc, const Vec2& p) {
  const Vec2 rel = p - arc.center;
  const double rho = rel.norm();
  const double lo = std::min(arc.start_angle, arc.end_angle);
  const double hi = std::max(arc.start_angle, arc.end_angle);
  if (rho > 0.0) {
    // Bring the polar angle of p into [lo, lo + 2π).
    double phi = std::atan2(rel.y(), rel.x());
    while (phi < lo) phi += 2.0 * std::numbers::pi;
    while (phi >= lo + 2.0 * std::numbers::pi) phi -= 2.0 * std::numbers::pi;
    if (phi <= hi) return std::abs(rho - arc.radius);
  }
  const Vec2 a = arc.center + arc.radius * Vec2(std::cos(lo), std::sin(lo));
  const Vec2 b = arc.center + arc.radius * Vec2(std::cos(hi), std::sin(hi));
  return std::min((p - a).norm(), (p - b).norm());
}

void validate_curve(const Curve& curve) {
  std::visit(Overloaded{
                 [](const LinePiece& l) {
                   if ((l.end - l.start).norm() <= 1e-14) {
                     std::ostringstream os;
                     os << "degenerate line piece: zero length at (" << l.start.x() << ", "
                        << l.start.y() << ")";
                     throw GeometryError(os.str());
                   }
                 },
                 [](const ArcPiece& a) {
                   if (!(a.radius > 0.0)) {
                     std::ostringstream os;
                     os << "degenerate arc piece: radius " << a.radius << " <= 0";
                     throw GeometryError(os.str());
                   }
                   if (std::abs(a.end_angle - a.start_angle) <= 1e-14) {
                     throw GeometryError("degenerate arc piece: zero angular span");
                   }
                 },
             },
             curve);
}

Curve slice_curve(const Curve& curve, double lo, double hi) {
  return std::visit(Overloaded{
                        [&](const LinePiece& l) -> Curve {
                          const Vec2 mid = 0.5 * (l.start + l.end);
                          const Vec2 half = 0.5 * (l.end - l.start);
                          return LinePiece{mid + lo * half, mid + hi * half};
                        },
                        [&](const ArcPiece& a) -> Curve {
                          const double mid = 0.5 * (a.start_angle + a.end_angle);
                          const double half = 0.5 * (a.end_angle - a.start_angle);
                          return ArcPiece{a.center, a.radius, mid + lo * half, mid + hi * half};
                        },
                    },
                    curve);
}

}  // namespace

BoundaryCondition BoundaryCondition::dirichlet(ScalarField value) {
  return {BcKind::Dirichlet, std::move(value), {}};
}
BoundaryCondition BoundaryCondition::neumann(ScalarField flux) {
  return {BcKind::Neumann, std::move(flux), {}};
}
BoundaryCondition BoundaryCondition::dirichlet(VectorField displacement) {
  return {BcKind::Dirichlet, {}, std::move(displacement)};
}
BoundaryCondition BoundaryCondition::neumann(VectorField traction) {
  return {BcKind::Neumann, {}, std::move(traction)};
}
BoundaryCondition BoundaryCondition::interface() { return {BcKind::Interface, {}, {}}; }

Vec2 Segment::point(double xi) const {
  return std::visit(Overloaded{
                        [&](const LinePiece& l) -> Vec2 {
                          return 0.5 * (l.start + l.end) + 0.5 * xi * (l.end - l.start);
                        },
                        [&](const ArcPiece& a) -> Vec2 {
                          const double phi = 0.5 * (a.start_angle + a.end_angle) +
                                             0.5 * xi * (a.end_angle - a.start_angle);
                          return a.center + a.radius * Vec2(std::cos(phi), std::sin(phi));
                        },
                    },
                    curve);
}

Vec2 Segment::tangent(double xi) const {
  return std::visit(Overloaded{
                        [&](const LinePiece& l) -> Vec2 { return 0.5 * (l.end - l.start); },
                        [&](const ArcPiece& a) -> Vec2 {
                          const double half = 0.5 * (a.end_angle - a.start_angle);
                          const double phi = 0.5 * (a.start_angle + a.end_angle) + xi * half;
                          return a.radius * half * Vec2(-std::sin(phi), std::cos(phi));
                        },
                    },
                    curve);
}

double Segment::half_arc() const {
  return std::visit(Overloaded{
                        [](const LinePiece& l) { return 0.5 * (l.end - l.start).norm(); },
                        [](const ArcPiece& a) {
                          return 0.5 * a.radius * std::abs(a.end_angle - a.start_angle);
                        },
                    },
                    curve);
}

SegmentPoint Segment::at(double xi) const {
  const Vec2 t = tangent(xi);
  const double j = t.norm();
  return {point(xi), j, Vec2(t.y(), -t.x()) / j};
}

Segment Segment::slice(double lo, double hi) const {
  Segment s = *this;
  s.curve = slice_curve(curve, lo, hi);
  return s;
}

Segment Segment::reversed() const { return slice(1.0, -1.0); }

double Segment::distance_to(const Vec2& p) const {
  return std::visit(Overloaded{
                        [&](const LinePiece& l) { return distance_to_line(l, p); },
                        [&](const ArcPiece& a) { return distance_to_arc(a, p); },
                    },
                    curve);
}

SegmentPoint segment_point(const Segment& seg, double xi) { return seg.at(xi); }

double Boundary::length() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.length();
  return total;
}

double Boundary::distance_to(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) best = std::min(best, s.distance_to(p));
  return best;
}

Boundary Boundary::refined(int k) const {
  if (k < 1) throw GeometryError("refinement factor must be >= 1");
  Boundary out;
  for (const auto& loop : loops) {
    Loop l{out.segments.size(), loop.count * static_cast<std::size_t>(k), loop.closed};
    for (std::size_t i = loop.first; i < loop.first + loop.count; ++i) {
      for (int j = 0; j < k; ++j) {
        const double lo = -1.0 + 2.0 * j / k;
        const double hi = -1.0 + 2.0 * (j + 1) / k;
        out.segments.push_back(segments[i].slice(lo, hi));
      }
    }
    out.loops.push_back(l);
  }
  return out;
}

Boundary build_boundary(const GeometrySpec& spec) {
  Boundary boundary;
  for (const auto& loop_spec : spec.loops) {
    if (loop_spec.pieces.empty()) throw GeometryError("empty loop in geometry description");
    Loop loop{boundary.segments.size(), 0, loop_spec.closed};
    for (const auto& piece : loop_spec.pieces) {
      validate_curve(piece.curve);
      if (piece.count < 1) {
        throw GeometryError("segment count must be >= 1, got " + std::to_string(piece.count));
      }
      Segment whole{piece.curve, piece.region_id, piece.bc};
      if (!boundary.segments.empty() && loop.count > 0) {
        const Vec2 prev = boundary.segments.back().end();
        if ((prev - whole.start()).norm() > kChainTolerance) {
          throw GeometryError("loop pieces do not chain: gap of " +
                              std::to_string((prev - whole.start()).norm()));
        }
      }
      for (int j = 0; j < piece.count; ++j) {
        const double lo = -1.0 + 2.0 * j / piece.count;
        const double hi = -1.0 + 2.0 * (j + 1) / piece.count;
        boundary.segments.push_back(whole.slice(lo, hi));
      }
      loop.count += static_cast<std::size_t>(piece.count);
    }
    if (loop.closed) {
      const Vec2 first = boundary.segments[loop.first].start();
      const Vec2 last = boundary.segments.back().end();
      if ((first - last).norm() > kChainTolerance) {
        throw GeometryError("closed loop does not close: gap of " +
                            std::to_string((first - last).norm()));
      }
    }
    boundary.loops.push_back(loop);
  }
  return boundary;
}

PieceSpec line_piece(const Vec2& a, const Vec2& b, int count, BoundaryCondition bc) {
  return {LinePiece{a, b}, count, std::move(bc), 0};
}

PieceSpec arc_piece(const Vec2& center, double radius, double start_angle, double end_angle,
                    int count, BoundaryCondition bc) {
  return {ArcPiece{center, radius, start_angle, end_angle}, count, std::move(bc), 0};
}

PieceSpec circle_piece(const Vec2& center, double radius, int count, bool clockwise,
                       BoundaryCondition bc) {
  const double end = clockwise ? -2.0 * std::numbers::pi : 2.0 * std::numbers::pi;
  return arc_piece(center, radius, 0.0, end, count, std::move(bc));
}

std::vector<TrajectorySample> trajectory(const Boundary& boundary, std::size_t count,
                                         const std::vector<std::size_t>& segments) {
  std::vector<std::size_t> ids = segments;
  if (ids.empty()) {
    ids.resize(boundary.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  }
  std::vector<double> starts;
  double total = 0.0;
  for (auto id : ids) {
    starts.push_back(total);
    total += boundary.segments.at(id).length();
  }
  std::vector<TrajectorySample> out;
  out.reserve(count);
  std::size_t k = 0;
  for (std::size_t i = 0; i < count; ++i) {
    // Midpoint sampling keeps samples off segment ends and corners.
    const double s = (static_cast<double>(i) + 0.5) * total / static_cast<double>(count);
    while (k + 1 < ids.size() && s >= starts[k + 1]) ++k;
    const double len = boundary.segments[ids[k]].length();
    const double xi = std::clamp(-1.0 + 2.0 * (s - starts[k]) / len, -1.0, 1.0);
    out.push_back({ids[k], xi, s});
  }
  return out;
}

int winding_number(const Boundary& boundary, const Vec2& p) {
  double total = 0.0;
  for (const auto& loop : boundary.loops) {
    if (!loop.closed) continue;
    for (std::size_t i = loop.first; i < loop.first + loop.count; ++i) {
      const auto& seg = boundary.segments[i];
      constexpr int kSub = 64;
      Vec2 prev = seg.point(-1.0) - p;
      for (int j = 1; j <= kSub; ++j) {
        const Vec2 cur = seg.point(-1.0 + 2.0 * j / kSub) - p;
        total += wrap_angle(std::atan2(cur.y(), cur.x()) - std::atan2(prev.y(), prev.x()));
        prev = cur;
      }
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace binn
