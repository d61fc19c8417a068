#pragma once

#include "binn/assembly.hpp"
#include "binn/geometry.hpp"
#include "binn/network.hpp"

#include <vector>

namespace binn {

enum class DomainKind { Interior, Exterior };

// Laplace problem on the domain bounded by `boundary`. Exterior problems are
// posed for a decaying field, with normals pointing into the hole.
struct PotentialProblem {
  Boundary boundary;
  DomainKind domain = DomainKind::Interior;
  int ng = 10;

  BieModel model() const;
};

constexpr double kDefaultMargin = 0.03;

std::vector<SourcePoint> source_points(const PotentialProblem& problem);

// Flux ∇φ·n on Dirichlet segments, φ on Neumann segments.
double boundary_unknowns(const NetworkParams& params, const SegmentPoint& x, const Segment& seg);

double residual(const PotentialProblem& problem, const NetworkParams& params, const SourcePoint& sp);

// All residuals with the boundary unknowns taken from `field`.
Eigen::VectorXd residuals(const PotentialProblem& problem, const FieldFn& field);
Eigen::VectorXd residuals(const PotentialProblem& problem, const NetworkParams& params);

// (1/N_s) Σ R².
double loss(const PotentialProblem& problem, const NetworkParams& params);

struct InteriorValue {
  double value = 0.0;
  double distance = 0.0;  // to the boundary
  bool near_boundary = false;  // inside the margin: nearly singular, degraded accuracy
};

std::vector<InteriorValue> interior_values(const PotentialProblem& problem,
                                           const NetworkParams& params,
                                           const std::vector<Vec2>& ys, int refine = 1,
                                           double margin = kDefaultMargin);
InteriorValue interior_value(const PotentialProblem& problem, const NetworkParams& params,
                             const Vec2& y, int refine = 1, double margin = kDefaultMargin);

// Network channels at every evaluation point of `pts`.
Eigen::MatrixXd network_channels(const NetworkParams& params, const EvalPoints& pts);

}  // namespace binn
