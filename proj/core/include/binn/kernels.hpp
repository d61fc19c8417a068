#pragma once

#include "binn/geometry.hpp"

#include <Eigen/Core>

#include <stdexcept>

namespace binn {

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlaneCondition { PlaneStrain, PlaneStress };

struct Material {
  double E = 1.0;
  double nu = 0.3;
  PlaneCondition plane = PlaneCondition::PlaneStrain;

  // Throws unless E > 0 and -1 < ν < 0.5.
  static Material make(double E, double nu, PlaneCondition plane);

  double G() const { return E / (2.0 * (1.0 + nu)); }
  // Poisson ratio entering the plane-strain form of kernels and Hooke's law;
  // plane stress maps to ν/(1 + ν) with G unchanged.
  double kernel_nu() const { return plane == PlaneCondition::PlaneStress ? nu / (1.0 + nu) : nu; }
};

struct PotentialKernel {
  double us = 0.0;
  double dusdn = 0.0;
};

// us(α, β): displacement component β caused by a unit load along α at y.
// ts(α, β): the matching traction component on the surface with normal n at x.
struct ElasticKernel {
  Eigen::Matrix2d us = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d ts = Eigen::Matrix2d::Zero();
};

constexpr double kCoincidentTolerance = 1e-14;

PotentialKernel laplace_kernel(const Vec2& x, const Vec2& y, const Vec2& n);
ElasticKernel kelvin_kernel(const Vec2& x, const Vec2& y, const Vec2& n, const Material& mat);

// Half-plane x₁ ≥ 0 with traction-free surface x₁ = 0 (x₁ is depth).
ElasticKernel halfplane_kernel(const Vec2& x, const Vec2& y, const Vec2& n,
                               const Material& mat);

// Image part alone, for tests of the construction.
ElasticKernel halfplane_auxiliary(const Vec2& x, const Vec2& y, const Vec2& n,
                                  const Material& mat);

// Displacement at `y` due to a unit load pressing into the half-plane at the
// surface point `x`.
Vec2 flamant_displacement(const Vec2& x, const Vec2& y, const Material& mat);

// Coefficient L of ln r in the kernel near the source, used to split the
// weakly singular part off on the source segment.
double laplace_log_coefficient();
Eigen::Matrix2d kelvin_log_coefficient(const Material& mat);
// Surface sources (x₁(y) = 0) carry the doubled image logarithm.
Eigen::Matrix2d halfplane_log_coefficient(const Vec2& y, const Material& mat);

// Stress at x caused by a unit load along α at y in the full plane:
// returns σ(β, γ).
Eigen::Matrix2d kelvin_stress(const Vec2& x, const Vec2& y, int alpha, const Material& mat);

}  // namespace binn
