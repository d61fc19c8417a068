#pragma once

#include "binn/assembly.hpp"
#include "binn/bie_potential.hpp"
#include "binn/kernels.hpp"
#include "binn/network.hpp"

#include <vector>

namespace binn {

// One or two elastic regions. Region 0 is the matrix; an optional region 1
// is an inclusion whose boundary is the shared interface. Interface tractions
// are computed with `interface_material` and the region's outward normal.
struct ElasticProblem {
  Boundary boundary;
  std::vector<Region> regions;
  KernelKind kernel = KernelKind::FullPlane;
  Material interface_material;
  double beta = 10.0;
  int ng = 10;

  BieModel model() const;
};

// Single region covering every segment of `boundary`.
ElasticProblem single_region(const Boundary& boundary, const Material& mat,
                             KernelKind kernel = KernelKind::FullPlane, int ng = 10);

struct StressState {
  Eigen::Matrix2d sigma;
  Eigen::Matrix2d eps;
};

// grad(β, γ) = ∂u_β/∂x_γ.
StressState stress_state(const Eigen::Matrix2d& grad, const Material& mat);

Vec2 traction_from_net(const NetworkParams& params, const Vec2& x, const Vec2& n,
                       const Material& mat);

std::vector<SourcePoint> source_points(const ElasticProblem& problem);

// Residual of one source point (single region or half-plane).
Vec2 residual_elastic(const ElasticProblem& problem, const NetworkParams& params,
                      const SourcePoint& sp);
// Residual of the source point on the given region: 1 = matrix, 2 = inclusion.
Vec2 residual_multidomain(const ElasticProblem& problem, const NetworkParams& params,
                          const SourcePoint& sp, int region_id);

Eigen::VectorXd residuals(const ElasticProblem& problem, const FieldFn& field);
Eigen::VectorXd residuals(const ElasticProblem& problem, const NetworkParams& params);

// Σ over regions of the region weight times Σ‖R‖²: (1/N) Σ‖R‖² for one region;
// (1/(N₁+N₂)) Σ‖R^M‖² + β (1/N₂) Σ‖R^I‖² for the inclusion problem.
double loss_elastic(const ElasticProblem& problem, const NetworkParams& params);
double loss_multidomain(const ElasticProblem& problem, const NetworkParams& params);

struct InteriorDisplacement {
  Vec2 value = Vec2::Zero();
  double distance = 0.0;
  bool near_boundary = false;
};

std::vector<InteriorDisplacement> interior_displacements(
    const ElasticProblem& problem, const NetworkParams& params, const std::vector<Vec2>& ys,
    std::size_t region = 0, int refine = 1, double margin = kDefaultMargin);
InteriorDisplacement interior_displacement(const ElasticProblem& problem,
                                           const NetworkParams& params, const Vec2& y,
                                           std::size_t region = 0, int refine = 1,
                                           double margin = kDefaultMargin);

}  // namespace binn
