#pragma once

// Shared residual machinery for the potential and elastic boundary integral
// equations. Every residual is affine in the network channels (value and both
// spatial derivatives of each output at each evaluation point), so the
// integration logic is written once as a stream of terms. One consumer
// scatters the terms into a dense operator R = M z + b that is built once
// before training; another applies them directly to field values.

#include "binn/geometry.hpp"
#include "binn/kernels.hpp"
#include "binn/network.hpp"
#include "binn/quadrature.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace binn {

enum class Physics { Potential, Elastic };
enum class KernelKind { FullPlane, HalfPlane };
enum class Quantity { Value, Flux, Traction };

struct RegionSegment {
  std::size_t segment = 0;
  int sign = 1;  // -1 when the region sees the segment with reversed normal
};

struct Region {
  Material material;
  std::vector<RegionSegment> segments;
  double row_weight = 1.0;  // loss weight of each residual component
};

struct BieModel {
  Physics physics = Physics::Potential;
  KernelKind kernel = KernelKind::FullPlane;
  Boundary boundary;
  std::vector<Region> regions;
  Material interface_material;  // material used for interface tractions
  int ng = 10;

  int outputs() const { return physics == Physics::Potential ? 1 : 2; }
  int channels() const { return 3 * outputs(); }
  void validate() const;
};

// Collocation point: center of a segment, seen from one region.
struct SourcePoint {
  Vec2 y;
  std::size_t segment = 0;
  std::size_t region = 0;
  double c = 0.5;  // free-term coefficient (C = c·I for elasticity)
  std::size_t row = 0;
};

std::vector<SourcePoint> source_points(const BieModel& model);

// Gauss nodes of every segment followed by every segment center.
struct EvalPoints {
  int ng = 0;
  std::vector<SegmentPoint> points;
  std::size_t segments = 0;

  std::size_t node(std::size_t seg, int i) const {
    return seg * static_cast<std::size_t>(ng) + static_cast<std::size_t>(i);
  }
  std::size_t center(std::size_t seg) const { return segments * static_cast<std::size_t>(ng) + seg; }
  std::size_t size() const { return points.size(); }
  Eigen::Matrix2Xd coordinates() const;
};

EvalPoints eval_points(const Boundary& boundary, int ng);

// Linear map from the channels of one point, ordered (φ_k, ∂₁φ_k, ∂₂φ_k) per
// output k, to the boundary quantity (n_u entries).
Eigen::MatrixXd quantity_map(Quantity q, const Vec2& n, const Material& mat, int outputs);

class TermSink {
 public:
  virtual ~TermSink() = default;
  // rows [row, row + n_u) += coef · quantity(point)
  virtual void unknown(std::size_t row, std::size_t point, const Eigen::MatrixXd& qmap,
                       const Eigen::Matrix2d& coef) = 0;
  // rows [row, row + n_u) += value
  virtual void known(std::size_t row, const Eigen::Vector2d& value) = 0;
};

void emit_residual_terms(const BieModel& model, const EvalPoints& pts,
                         const std::vector<SourcePoint>& sources, TermSink& sink);

// Terms of the interior representation u(y) at rows [0, n_u).
void emit_interior_terms(const BieModel& model, const EvalPoints& pts, std::size_t region,
                         const Vec2& y, TermSink& sink);

// Channel matrix (channels × points) from batched network outputs.
Eigen::MatrixXd channels_from_outputs(const BatchOutputs& out);

// Any field with value and spatial Jacobian, e.g. a closed-form solution.
using FieldFn = std::function<SpatialOutput(const Vec2&)>;
Eigen::MatrixXd channels_from_field(const EvalPoints& pts, const FieldFn& field, int outputs);

struct ResidualOperator {
  int outputs = 1;
  EvalPoints points;
  std::vector<SourcePoint> sources;
  Eigen::MatrixXd M;  // rows × (channels · points), point-major columns
  Eigen::VectorXd b;
  Eigen::VectorXd weights;

  std::size_t rows() const { return static_cast<std::size_t>(b.size()); }
  // R = M z + b with z the flattened channel matrix.
  Eigen::VectorXd residual(const Eigen::MatrixXd& channels) const;
  double loss(const Eigen::VectorXd& r) const { return (weights.array() * r.array().square()).sum(); }
};

ResidualOperator assemble(const BieModel& model);

// Residual vector evaluated term by term without the stored operator.
Eigen::VectorXd residual_direct(const BieModel& model, const Eigen::MatrixXd& channels);

// Interior values (outputs × points) by direct integration over the region
// boundary, each segment split into `refine` pieces.
using ChannelSource = std::function<Eigen::MatrixXd(const EvalPoints&)>;
Eigen::MatrixXd interior_direct(const BieModel& model, std::size_t region,
                                const std::vector<Vec2>& ys, const ChannelSource& channels,
                                int refine = 1);

BieModel refined_model(const BieModel& model, int k);

}  // namespace binn
