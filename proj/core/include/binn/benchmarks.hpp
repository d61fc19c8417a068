#pragma once

// The five reference problems: geometry, boundary data, reference fields and
// the sampling used to score a trained network against them.

#include "binn/assembly.hpp"
#include "binn/bie_elastic.hpp"
#include "binn/bie_potential.hpp"
#include "binn/oracle.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace binn {

// Reference value of the boundary unknown at a point of a segment: the flux
// or traction on Dirichlet segments, the value on Neumann segments, and the
// displacement followed by the traction on interface segments.
using BoundaryReference = std::function<Eigen::VectorXd(std::size_t segment, const SegmentPoint&)>;

struct ReferenceSolution {
  FieldFn field;  // closed-form field with Jacobian, where one exists
  std::function<Eigen::VectorXd(const Vec2&)> interior;
  BoundaryReference boundary;
  std::vector<Vec2> grid;  // interior comparison points
  std::size_t grid_region = 0;
  std::vector<TrajectorySample> path;  // boundary observation samples
};

struct Benchmark {
  std::string name;
  Physics physics = Physics::Potential;
  PotentialProblem potential;
  ElasticProblem elastic;
  ReferenceSolution reference;

  BieModel model() const { return physics == Physics::Potential ? potential.model() : elastic.model(); }
  Architecture architecture(int width = 20, int blocks = 2) const;
  // Default training length and step size.
  int default_iterations = 10000;
  double default_lr = 1e-3;
};

// u = sin x₁ sinh x₂ + cos x₁ cosh x₂ inside five unit semicircles on a
// regular pentagon; Dirichlet everywhere.
Benchmark make_flower(int ng = 10);
SpatialOutput flower_solution(const Vec2& x);

// Perturbation potential of uniform flow (speed 3) past a cylinder of radius
// 1.5, posed on the exterior with Neumann data.
Benchmark make_cylinder_flow(int ng = 10);
SpatialOutput flow_perturbation(const Vec2& x);

// End-loaded cantilever on [0, 2] × [-1, 1], plane stress.
Benchmark make_beam(int ng = 10);
SpatialOutput beam_solution(const Vec2& x);
Eigen::Matrix2d beam_stress(const Vec2& x);

// Hertz pressure on the patch x₂ ∈ [-1, 1] of the half-plane x₁ ≥ 0.
Benchmark make_hertz(int ng = 10);
double hertz_pressure(double x2);
// Superposition of Flamant solutions under the Hertz pressure, integrated
// adaptively. Valid anywhere in x₁ ≥ 0, including on the patch.
Vec2 hertz_displacement(const Vec2& y, const Material& mat);

// Stiff circular inclusion in a plate under uniaxial tension.
struct InclusionSetup {
  int per_edge = 40;
  int interface = 40;
  double E1 = 1.0;
  double E2 = 10.0;
  double beta = 10.0;
  int ng = 10;
};
ElasticProblem inclusion_problem(const InclusionSetup& setup);

struct InclusionOracle {
  BieModel model;
  BemSolution solution;
  std::vector<std::size_t> interface;  // interface element indices
};
InclusionOracle solve_inclusion_oracle(const InclusionSetup& setup);

// Network problem with 200 source points against an oracle with 96 elements
// per plate edge and 128 on the interface.
Benchmark make_inclusion(int ng = 10, bool with_oracle = true);

std::optional<Benchmark> make_benchmark(const std::string& name, int ng = 10);
std::vector<std::string> benchmark_names();

struct ErrorMetrics {
  std::vector<double> abs_error;  // per sample, Euclidean over components
  double rel_l2 = 0.0;  // NaN in absolute-only mode
  double abs_l2 = 0.0;
  bool relative = true;
};

ErrorMetrics error_metrics(std::span<const double> pred, std::span<const double> ref);
// Columns are samples; rows are components stacked into one L2 norm.
ErrorMetrics error_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref);

// Boundary unknown of a field at a point, as defined for BoundaryReference.
Eigen::VectorXd boundary_unknown(const BieModel& model, std::size_t segment,
                                 const SegmentPoint& p, const SpatialOutput& field);

struct Evaluation {
  std::vector<double> s;  // arc coordinate of each path sample
  std::vector<Vec2> path_points;
  Eigen::MatrixXd boundary_pred;
  Eigen::MatrixXd boundary_ref;
  ErrorMetrics boundary;
  Eigen::MatrixXd interior_pred;
  Eigen::MatrixXd interior_ref;
  ErrorMetrics interior;
};

Evaluation evaluate(const Benchmark& bench, const NetworkParams& params, int refine = 1);

// CSV with columns s,x1,x2,value...,reference...,abs_error.
void write_boundary_csv(const std::string& path, const Evaluation& ev);
// CSV with columns x1,x2,value...,reference...,abs_error.
void write_interior_csv(const std::string& path, const Benchmark& bench, const Evaluation& ev);

}  // namespace binn
