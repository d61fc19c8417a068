#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace binn {

using Vec2 = Eigen::Vector2d;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BcKind { Dirichlet, Neumann, Interface };

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

// Boundary data for one segment. Potential problems read `scalar`
// (ū on Dirichlet, q̄ on Neumann); elastic problems read `vector`
// (ū_α on Dirichlet, t̄_α on Neumann). Interface segments carry no data.
struct BoundaryCondition {
  BcKind kind = BcKind::Dirichlet;
  ScalarField scalar;
  VectorField vector;

  static BoundaryCondition dirichlet(ScalarField value);
  static BoundaryCondition neumann(ScalarField flux);
  static BoundaryCondition dirichlet(VectorField displacement);
  static BoundaryCondition neumann(VectorField traction);
  static BoundaryCondition interface();
};

struct LinePiece {
  Vec2 start;
  Vec2 end;
};

// Circular arc traversed from angle `start_angle` to `end_angle` (radians);
// end < start means clockwise traversal.
struct ArcPiece {
  Vec2 center;
  double radius = 1.0;
  double start_angle = 0.0;
  double end_angle = 0.0;
};

using Curve = std::variant<LinePiece, ArcPiece>;

struct SegmentPoint {
  Vec2 x;
  double jacobian;
  Vec2 normal;
};

// One boundary piece mapped from ξ ∈ [-1, 1]. The source point sits at ξ = 0.
// The normal is the right-hand normal of the traversal direction, so
// counter-clockwise loops get outward normals and clockwise holes get normals
// pointing into the hole.
struct Segment {
  Curve curve;
  int region_id = 0;
  BoundaryCondition bc;

  SegmentPoint at(double xi) const;
  Vec2 point(double xi) const;
  Vec2 tangent(double xi) const;  // dx/dξ
  Vec2 center() const { return point(0.0); }
  double half_arc() const;
  double length() const { return 2.0 * half_arc(); }
  Vec2 start() const { return point(-1.0); }
  Vec2 end() const { return point(1.0); }

  // Arc-length coordinate t measured from the center, t = a·ξ.
  double arc_coordinate(double xi) const { return half_arc() * xi; }

  // Sub-segment covering ξ ∈ [lo, hi], same orientation and data.
  Segment slice(double lo, double hi) const;
  Segment reversed() const;
  double distance_to(const Vec2& p) const;
};

SegmentPoint segment_point(const Segment& seg, double xi);

// Geometric description consumed by build_boundary. Each piece is split into
// `count` equal segments carrying `bc`.
struct PieceSpec {
  Curve curve;
  int count = 1;
  BoundaryCondition bc;
  int region_id = 0;
};

struct LoopSpec {
  std::vector<PieceSpec> pieces;
  bool closed = true;
};

struct GeometrySpec {
  std::vector<LoopSpec> loops;
};

struct Loop {
  std::size_t first = 0;  // index of the first segment in Boundary::segments
  std::size_t count = 0;
  bool closed = true;
};

struct Boundary {
  std::vector<Segment> segments;
  std::vector<Loop> loops;

  std::size_t size() const { return segments.size(); }
  double length() const;
  double distance_to(const Vec2& p) const;
  // Splits every segment into k equal pieces (k >= 1).
  Boundary refined(int k) const;
};

Boundary build_boundary(const GeometrySpec& spec);

// Convenience piece constructors.
PieceSpec line_piece(const Vec2& a, const Vec2& b, int count, BoundaryCondition bc = {});
PieceSpec arc_piece(const Vec2& center, double radius, double start_angle,
                    double end_angle, int count, BoundaryCondition bc = {});
// Full circle starting at angle 0; clockwise when `clockwise` is set.
PieceSpec circle_piece(const Vec2& center, double radius, int count, bool clockwise,
                       BoundaryCondition bc = {});

// Evenly spaced samples by arc length along the listed segments.
struct TrajectorySample {
  std::size_t segment;
  double xi;
  double s;  // cumulative arc length from the start of the trajectory
};
std::vector<TrajectorySample> trajectory(const Boundary& boundary, std::size_t count,
                                         const std::vector<std::size_t>& segments = {});

// Winding-number containment test for closed loops of the boundary.
int winding_number(const Boundary& boundary, const Vec2& p);

}  // namespace binn
