#include "verify.hpp"

#include "binn/benchmarks.hpp"
#include "binn/oracle.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

namespace binn::cli {

namespace {

// Si(1) and Shi(1).
constexpr double kSi1 = 0.94608307036718301494;
constexpr double kShi1 = 1.05725087537572851457;

CheckResult below(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, std::isfinite(value) && value < threshold};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double polynomial_exactness() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const QuadratureRule rule = gauss_legendre(10);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> c(20);
    for (auto& v : c) v = U(rng);
    const Vec2 a(U(rng), U(rng)), b(U(rng) + 2.0, U(rng));
    const Segment seg{LinePiece{a, b}, 0, {}};
    // Polynomial in the arc parameter ξ; its exact integral times L/2.
    const auto p = [&](double xi) {
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) s = s * xi + c[k];
      return s;
    };
    double exact = 0.0;
    for (std::size_t k = 0; k < c.size(); k += 2) exact += 2.0 * c[k] / static_cast<double>(k + 1);
    exact *= 0.5 * (b - a).norm();
    const double got = integrate_regular(seg, rule, [&](const SegmentPoint& q) {
      return p(2.0 * (q.x - a).dot(b - a) / (b - a).squaredNorm() - 1.0);
    });
    worst = std::max(worst, rel(got, exact));
  }
  return worst;
}

Boundary square(BoundaryCondition bc) {
  LoopSpec l{{line_piece({0, 0}, {2, 0}, 10, bc), line_piece({2, 0}, {2, 2}, 10, bc),
              line_piece({2, 2}, {0, 2}, 10, bc), line_piece({0, 2}, {0, 0}, 10, bc)},
             true};
  return build_boundary({{l}});
}

Boundary circle(const Vec2& c, double r, int n, BoundaryCondition bc) {
  return build_boundary({{LoopSpec{{circle_piece(c, r, n, false, bc)}, true}}});
}

SpatialOutput constant(const Vec2&, int outputs) {
  SpatialOutput o;
  o.value = Eigen::VectorXd::Zero(outputs);
  o.value(0) = 1.0;
  o.jacobian = Eigen::MatrixXd::Zero(outputs, 2);
  return o;
}

double constant_potential_residual() {
  const auto one = BoundaryCondition::dirichlet(ScalarField([](const Vec2&) { return 1.0; }));
  double worst = 0.0;
  for (const Boundary& b : {circle(Vec2(0.5, -0.2), 1.3, 32, one), square(one), make_flower().potential.boundary}) {
    PotentialProblem p;
    p.boundary = b;
    for (auto& s : p.boundary.segments) s.bc = one;
    worst = std::max(worst, residuals(p, [](const Vec2& x) { return constant(x, 1); }).cwiseAbs().maxCoeff());
  }
  return worst;
}

double rigid_body_residual() {
  const auto fixed = BoundaryCondition::dirichlet(VectorField([](const Vec2&) { return Vec2(1.0, 0.0); }));
  const auto free = BoundaryCondition::neumann(VectorField([](const Vec2&) { return Vec2::Zero(); }));
  const Material mat = Material::make(1.0, 0.3, PlaneCondition::PlaneStrain);
  double worst = 0.0;
  for (const auto& bc : {fixed, free}) {
    for (const Boundary& b : {square(bc), circle(Vec2(1.0, 1.0), 0.8, 32, bc)}) {
      const ElasticProblem p = single_region(b, mat);
      worst = std::max(worst, residuals(p, [](const Vec2& x) { return constant(x, 2); }).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double bem_flux_error() {
  // u = x₁ in a disc of radius 1/2; the flux is n₁.
  PotentialProblem p;
  p.boundary = circle(Vec2::Zero(), 0.5, 64,
                      BoundaryCondition::dirichlet(ScalarField([](const Vec2& x) { return x.x(); })));
  const BieModel m = p.model();
  const BemSolution s = bem_solve(m);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m.boundary.size(); ++i) {
    const SegmentPoint c = m.boundary.segments[i].at(0.0);
    num += std::pow(s.t[i].x() - c.normal.x(), 2);
    den += std::pow(c.normal.x(), 2);
  }
  return std::sqrt(num / den);
}

double halfplane_surface_traction() {
  const Material mat = Material::make(1.0, 0.3, PlaneCondition::PlaneStrain);
  double worst = 0.0;
  for (const Vec2& y : {Vec2(0.5, 0.2), Vec2(2.0, -1.0), Vec2(0.0, 0.3)}) {
    for (const double x2 : {-3.0, -0.4, 0.7, 2.5}) {
      const Vec2 x(0.0, x2);
      if ((x - y).norm() < 1e-9) continue;
      worst = std::max(worst, halfplane_kernel(x, y, Vec2(-1.0, 0.0), mat).ts.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> run_verify_suite() {
  std::vector<CheckResult> out;
  out.push_back(below("gauss-10 exactness, degree-19 polynomials (rel)", polynomial_exactness(), 1e-12));

  const QuadratureRule g10 = gauss_legendre(10), g64 = gauss_legendre(64);
  out.push_back(below("weak-log f = 1 closed form (abs)",
                      std::abs(integrate_weak_log(g10, 1.0, [](double) { return 1.0; }, 1.0) + 2.0), 1e-12));
  out.push_back(below("cauchy f = 1 vanishes (abs)",
                      std::abs(integrate_cauchy(g10, [](double) { return 1.0; })), 1e-12));
  out.push_back(below("weak-log cos t, n_g = 64, vs -2 Si(1) (rel)",
                      rel(integrate_weak_log(g64, 1.0, [](double t) { return std::cos(t); }, 1.0), -2.0 * kSi1),
                      1e-5));
  out.push_back(below("cauchy e^t, n_g = 10, vs 2 Shi(1) (rel)",
                      rel(integrate_cauchy(g10, [](double t) { return std::exp(t); }), 2.0 * kShi1), 1e-8));
  const double adaptive = adaptive_integral([](double t) { return std::log(std::abs(t)) * std::cos(t); }, -1.0,
                                            1.0, Singularity::Log, 0.0);
  out.push_back(below("adaptive oracle ln|t| cos t vs -2 Si(1) (rel)", rel(adaptive, -2.0 * kSi1), 1e-12));

  out.push_back(below("constant potential residual, circle/square/flower", constant_potential_residual(), 1e-6));
  out.push_back(below("rigid translation residual, square/circle", rigid_body_residual(), 1e-5));
  out.push_back(below("half-plane kernel traction on the free surface", halfplane_surface_traction(), 1e-12));

  const Benchmark flower = make_flower(), flow = make_cylinder_flow(), beam = make_beam();
  out.push_back(below("flower analytic data residual",
                      residuals(flower.potential, flower_solution).cwiseAbs().maxCoeff(), 1e-3));
  out.push_back(below("cylinder flow analytic data residual",
                      residuals(flow.potential, flow_perturbation).cwiseAbs().maxCoeff(), 1e-3));
  out.push_back(below("beam analytic data residual",
                      residuals(beam.elastic, beam_solution).cwiseAbs().maxCoeff(), 5e-3));
  out.push_back(below("BEM oracle flux of u = x1 on a disc (rel L2)", bem_flux_error(), 0.02));
  return out;
}

void print_table(std::ostream& os, const std::vector<CheckResult>& results) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  os << std::left << std::setw(static_cast<int>(width)) << "check"
     << "  " << std::setw(12) << "value" << "  " << std::setw(9) << "limit" << "  result\n";
  for (const auto& r : results) {
    os << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::scientific
       << std::setprecision(3) << std::setw(12) << r.value << "  " << std::setw(9) << std::setprecision(0)
       << r.threshold << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
  }
  os << std::defaultfloat;
}

}  // namespace binn::cli
