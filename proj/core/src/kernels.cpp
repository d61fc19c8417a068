#include "binn/kernels.hpp"

#include "binn/ad.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace binn {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 separation(const Vec2& x, const Vec2& y, const char* who) {
  const Vec2 r = x - y;
  if (r.norm() < kCoincidentTolerance) {
    std::ostringstream os;
    os << who << ": coincident field and source point (" << x.x() << ", " << x.y()
       << "); singular evaluations must use the regularized quadrature paths";
    throw KernelError(os.str());
  }
  return r;
}

void require_half_plane(const Vec2& p, const char* what) {
  if (p.x() < -1e-12) {
    std::ostringstream os;
    os << "halfplane_kernel: " << what << " (" << p.x() << ", " << p.y()
       << ") lies outside the half-plane x1 >= 0";
    throw KernelError(os.str());
  }
}

// Image displacement field u(α, β) as a function of the field point, carried
// as duals so the strain comes out of the same expression.
using D = ad::Dual2<double>;

std::array<std::array<D, 2>, 2> auxiliary_displacement(const Vec2& x, const Vec2& y, double nu,
                                                       double G) {
  const double kd = 1.0 / (8.0 * kPi * (1.0 - nu) * G);
  const double c = y.x();
  const D x1{x.x(), 1.0, 0.0};
  const D x2{x.y(), 0.0, 1.0};
  const D r1 = x1 - c;
  const D r2 = x2 - y.y();
  const D big1 = x1 + c;
  const D big2 = r2;
  const D rr = big1 * big1 + big2 * big2;
  const D rr2 = rr * rr;
  const D lnr = 0.5 * ad::log(rr);
  const D theta = ad::atan2(big2, big1);
  const double k34 = 3.0 - 4.0 * nu;
  const double klog = 8.0 * (1.0 - nu) * (1.0 - nu) - k34;
  const double kth = 4.0 * (1.0 - nu) * (1.0 - 2.0 * nu);
  const D cx = c * x1;

  std::array<std::array<D, 2>, 2> u;
  u[0][0] = kd * (-klog * lnr + (k34 * big1 * big1 - 2.0 * cx) / rr + 4.0 * cx * big1 * big1 / rr2);
  u[0][1] = kd * (k34 * r1 * r2 / rr + 4.0 * cx * big1 * r2 / rr2 - kth * theta);
  u[1][0] = kd * (k34 * r1 * r2 / rr - 4.0 * cx * big1 * r2 / rr2 + kth * theta);
  u[1][1] = kd * (-klog * lnr + (k34 * r2 * r2 + 2.0 * cx) / rr - 4.0 * cx * r2 * r2 / rr2);
  return u;
}

}  // namespace

Material Material::make(double E, double nu, PlaneCondition plane) {
  if (!(E > 0.0)) throw KernelError("material: Young's modulus must be positive");
  if (!(nu > -1.0 && nu < 0.5)) {
    throw KernelError("material: Poisson ratio must lie in (-1, 0.5), got " + std::to_string(nu));
  }
  return {E, nu, plane};
}

PotentialKernel laplace_kernel(const Vec2& x, const Vec2& y, const Vec2& n) {
  const Vec2 r = separation(x, y, "laplace_kernel");
  const double r2 = r.squaredNorm();
  return {-std::log(r2) / (4.0 * kPi), -r.dot(n) / (2.0 * kPi * r2)};
}

ElasticKernel kelvin_kernel(const Vec2& x, const Vec2& y, const Vec2& n, const Material& mat) {
  const Vec2 rv = separation(x, y, "kelvin_kernel");
  const double nu = mat.kernel_nu();
  const double G = mat.G();
  const double r = rv.norm();
  const Vec2 dr = rv / r;
  const double drdn = dr.dot(n);
  const double kd = 1.0 / (8.0 * kPi * G * (1.0 - nu));
  const double kt = -1.0 / (4.0 * kPi * (1.0 - nu) * r);
  const double lnr = std::log(r);
  ElasticKernel k;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double delta = a == b ? 1.0 : 0.0;
      k.us(a, b) = kd * (-(3.0 - 4.0 * nu) * lnr * delta + dr[a] * dr[b]);
      k.ts(a, b) = kt * (drdn * ((1.0 - 2.0 * nu) * delta + 2.0 * dr[a] * dr[b]) -
                         (1.0 - 2.0 * nu) * (dr[a] * n[b] - dr[b] * n[a]));
    }
  }
  return k;
}

Eigen::Matrix2d kelvin_stress(const Vec2& x, const Vec2& y, int alpha, const Material& mat) {
  const Vec2 rv = separation(x, y, "kelvin_stress");
  const double nu = mat.kernel_nu();
  const double r = rv.norm();
  const Vec2 dr = rv / r;
  const double k = -1.0 / (4.0 * kPi * (1.0 - nu) * r);
  Eigen::Matrix2d s;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double dai = alpha == i ? 1.0 : 0.0;
      const double daj = alpha == j ? 1.0 : 0.0;
      const double dij = i == j ? 1.0 : 0.0;
      s(i, j) = k * ((1.0 - 2.0 * nu) * (dai * dr[j] + daj * dr[i] - dij * dr[alpha]) +
                     2.0 * dr[i] * dr[j] * dr[alpha]);
    }
  }
  return s;
}

ElasticKernel halfplane_auxiliary(const Vec2& x, const Vec2& y, const Vec2& n,
                                  const Material& mat) {
  require_half_plane(x, "field point");
  require_half_plane(y, "source point");
  separation(x, y, "halfplane_kernel");
  const double nu = mat.kernel_nu();
  const double G = mat.G();
  const auto u = auxiliary_displacement(x, y, nu, G);
  const double lambda = 2.0 * G * nu / (1.0 - 2.0 * nu);
  ElasticKernel k;
  for (int a = 0; a < 2; ++a) {
    const auto ab = static_cast<std::size_t>(a);
    Eigen::Matrix2d grad;  // grad(β, γ) = ∂u_αβ/∂x_γ
    for (int b = 0; b < 2; ++b) {
      const auto& e = u[ab][static_cast<std::size_t>(b)];
      k.us(a, b) = e.v;
      grad(b, 0) = e.d1;
      grad(b, 1) = e.d2;
    }
    const Eigen::Matrix2d eps = 0.5 * (grad + grad.transpose());
    const Eigen::Matrix2d sigma =
        2.0 * G * eps + lambda * eps.trace() * Eigen::Matrix2d::Identity();
    k.ts.row(a) = (sigma * n).transpose();
  }
  return k;
}

ElasticKernel halfplane_kernel(const Vec2& x, const Vec2& y, const Vec2& n,
                               const Material& mat) {
  const ElasticKernel aux = halfplane_auxiliary(x, y, n, mat);
  const ElasticKernel kel = kelvin_kernel(x, y, n, mat);
  return {kel.us + aux.us, kel.ts + aux.ts};
}

Vec2 flamant_displacement(const Vec2& x, const Vec2& y, const Material& mat) {
  const Vec2 r = separation(y, x, "flamant_displacement");
  const double nu = mat.kernel_nu();
  const double G = mat.G();
  const double rho = r.norm();
  const double theta = std::atan2(r.y(), r.x());
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {-(2.0 * (1.0 - nu) * std::log(rho) - c * c) / (2.0 * kPi * G),
          -((1.0 - 2.0 * nu) * theta - c * s) / (2.0 * kPi * G)};
}

double laplace_log_coefficient() { return -1.0 / (2.0 * kPi); }

Eigen::Matrix2d kelvin_log_coefficient(const Material& mat) {
  const double nu = mat.kernel_nu();
  const double kd = 1.0 / (8.0 * kPi * mat.G() * (1.0 - nu));
  return -(3.0 - 4.0 * nu) * kd * Eigen::Matrix2d::Identity();
}

Eigen::Matrix2d halfplane_log_coefficient(const Vec2& y, const Material& mat) {
  if (std::abs(y.x()) > 1e-12) return kelvin_log_coefficient(mat);
  const double nu = mat.kernel_nu();
  const double kd = 1.0 / (8.0 * kPi * mat.G() * (1.0 - nu));
  return -8.0 * (1.0 - nu) * (1.0 - nu) * kd * Eigen::Matrix2d::Identity();
}

}  // namespace binn
