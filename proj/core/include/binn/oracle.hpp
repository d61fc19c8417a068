#pragma once

#include "binn/assembly.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace binn {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Singularity { None, Log, Cauchy };

// Adaptive Gauss–Kronrod (7/15) integration of f over [a, b] to an absolute
// tolerance. A flagged singular point `at` is isolated: logarithmic
// singularities are smoothed by a power substitution on each side, Cauchy
// singularities by folding the symmetric neighborhood onto itself.
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         Singularity kind = Singularity::None, double at = 0.0,
                         double tol = 1e-12);

// Constant-element collocation solution: one value per segment. `u` and `t`
// hold displacement/potential and traction/flux (first component only for
// potential problems). Interface tractions refer to the segment's own normal.
struct BemSolution {
  int outputs = 1;
  std::vector<Vec2> u;
  std::vector<Vec2> t;
  double rcond = 0.0;
};

// Solves the boundary integral equations of `model` with one constant
// element per segment, midpoint collocation and a dense LU solve.
BemSolution bem_solve(const BieModel& model);

// Constant-element influence integrals of one element seen from y:
// g = ∫ u^s dΓ, h = ∫ t^s dΓ (top-left entry for potential problems).
struct ElementIntegrals {
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
};
ElementIntegrals element_integrals(const BieModel& model, const Material& mat,
                                   const Segment& seg, int sign, const Vec2& y, bool self);

// Closed forms for a straight element integrated from its own midpoint.
ElementIntegrals straight_self_integrals(const BieModel& model, const Material& mat,
                                         const Segment& seg);

// Interior value from a BEM solution (representation formula, element-wise).
Vec2 bem_interior(const BieModel& model, const BemSolution& sol, std::size_t region,
                  const Vec2& y);

void write_bem_csv(const std::string& path, const BieModel& model, const BemSolution& sol);

}  // namespace binn
