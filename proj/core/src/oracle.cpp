#include "binn/oracle.hpp"

#include "binn/quadrature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace binn {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at the odd Kronrod nodes and the center.
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kMaxDepth = 60;

struct Estimate {
  double value;
  double error;
};

Estimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kWgk[7] * fc;
  double g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[static_cast<std::size_t>(i)];
    const double s = f(c - dx) + f(c + dx);
    k += kWgk[static_cast<std::size_t>(i)] * s;
    if (i % 2 == 1) g += kWg[static_cast<std::size_t>(i / 2)] * s;
  }
  return {k * h, std::abs((k - g) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  const Estimate e = gk15(f, a, b);
  if (!std::isfinite(e.value)) {
    std::ostringstream os;
    os << "adaptive_integral: non-finite integrand on [" << a << ", " << b << "]";
    throw OracleError(os.str());
  }
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(e.value);
  if (e.error <= std::max(tol, floor)) return e.value;
  // Nothing left to resolve once the interval is a few ulps wide.
  if (b - a <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
    return e.value;
  }
  if (depth >= kMaxDepth) {
    std::ostringstream os;
    os.precision(17);
    os << "adaptive_integral: no convergence on [" << a << ", " << b << "] after " << kMaxDepth
       << " bisections; estimate " << e.value << " +- " << e.error;
    throw OracleError(os.str());
  }
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1);
}

// ∫ from s to s + h with t = s + h u⁴, which turns a log (or inverse-root)
// endpoint singularity into a smooth integrand.
double endpoint_substituted(const std::function<double(double)>& f, double s, double h,
                            double tol) {
  if (h == 0.0) return 0.0;
  const double ah = std::abs(h);
  return adapt(
      [&](double u) {
        if (u == 0.0) return 0.0;
        const double u3 = u * u * u;
        return f(s + h * u3 * u) * 4.0 * ah * u3;
      },
      0.0, 1.0, tol, 0);
}

Eigen::Matrix2d log_coef(const BieModel& m, const Material& mat, const Vec2& y) {
  if (m.physics == Physics::Potential) {
    Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
    l(0, 0) = laplace_log_coefficient();
    return l;
  }
  return m.kernel == KernelKind::HalfPlane ? halfplane_log_coefficient(y, mat)
                                           : kelvin_log_coefficient(mat);
}

ElementIntegrals kernel_at(const BieModel& m, const Material& mat, const Vec2& x, const Vec2& y,
                           const Vec2& n) {
  ElementIntegrals k;
  if (m.physics == Physics::Potential) {
    const PotentialKernel p = laplace_kernel(x, y, n);
    k.g(0, 0) = p.us;
    k.h(0, 0) = p.dusdn;
    return k;
  }
  const ElasticKernel e = m.kernel == KernelKind::HalfPlane ? halfplane_kernel(x, y, n, mat)
                                                            : kelvin_kernel(x, y, n, mat);
  k.g = e.us;
  k.h = e.ts;
  return k;
}

const QuadratureRule& rule16() {
  static const QuadratureRule r = gauss_legendre(16);
  return r;
}

Eigen::Vector2d data_at(const BieModel& m, const Segment& seg, const Vec2& x) {
  if (m.physics == Physics::Potential) return {seg.bc.scalar(x), 0.0};
  return seg.bc.vector(x);
}

}  // namespace

double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         Singularity kind, double at, double tol) {
  if (!(b > a)) throw OracleError("adaptive_integral: empty or reversed interval");
  if (kind == Singularity::None) return adapt(f, a, b, tol, 0);
  if (!(at >= a && at <= b)) throw OracleError("adaptive_integral: singular point outside interval");
  if (kind == Singularity::Log) {
    return endpoint_substituted(f, at, a - at, 0.5 * tol) +
           endpoint_substituted(f, at, b - at, 0.5 * tol);
  }
  // Principal value: fold [at − h, at + h] so the odd 1/τ parts cancel.
  const double h = std::min(at - a, b - at);
  double sum = 0.0;
  if (h > 0.0) {
    sum += adapt([&](double tau) { return tau == 0.0 ? 0.0 : f(at + tau) + f(at - tau); }, 0.0, h,
                 tol / 3.0, 0);
  }
  if (at - h > a) sum += adapt(f, a, at - h, tol / 3.0, 0);
  if (at + h < b) sum += adapt(f, at + h, b, tol / 3.0, 0);
  return sum;
}

ElementIntegrals element_integrals(const BieModel& model, const Material& mat,
                                   const Segment& seg, int sign, const Vec2& y, bool self) {
  const QuadratureRule& rule = rule16();
  ElementIntegrals out;
  if (!self) {
    const double d = std::max(seg.distance_to(y), 1e-300);
    const int pieces = std::clamp(static_cast<int>(std::ceil(4.0 * seg.length() / d)), 1, 256);
    for (int p = 0; p < pieces; ++p) {
      for (int i = 0; i < rule.order(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double xi = -1.0 + (2.0 * p + 1.0 + rule.nodes[k]) / pieces;
        const SegmentPoint q = seg.at(xi);
        const ElementIntegrals K = kernel_at(model, mat, q.x, y, sign * q.normal);
        const double w = rule.weights[k] * q.jacobian / pieces;
        out.g += w * K.g;
        out.h += w * K.h;
      }
    }
    return out;
  }
  // Own element: ln part by the subtraction–addition weights applied to a
  // unit density, bounded remainder on each half; the principal value of
  // t^s is the symmetric (even-order) Gauss sum.
  const double a = seg.half_arc();
  const Eigen::Matrix2d L = log_coef(model, mat, y);
  const WeakLogWeights wl = weak_log_weights(rule, a);
  double lnsum = wl.center;
  for (double w : wl.node) lnsum += w;
  out.g = lnsum * L;
  for (int side = -1; side <= 1; side += 2) {
    for (int i = 0; i < rule.order(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double xi = 0.5 * (rule.nodes[k] + side);
      const SegmentPoint q = seg.at(xi);
      const ElementIntegrals K = kernel_at(model, mat, q.x, y, sign * q.normal);
      const double w = 0.5 * rule.weights[k] * q.jacobian;
      out.g += w * (K.g - L * std::log(std::abs(a * xi)));
    }
  }
  for (int i = 0; i < rule.order(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const SegmentPoint q = seg.at(rule.nodes[k]);
    const ElementIntegrals K = kernel_at(model, mat, q.x, y, sign * q.normal);
    out.h += rule.weights[k] * q.jacobian * K.h;
  }
  return out;
}

ElementIntegrals straight_self_integrals(const BieModel& model, const Material& mat,
                                         const Segment& seg) {
  if (!std::holds_alternative<LinePiece>(seg.curve)) {
    throw OracleError("closed-form self integrals need a straight element");
  }
  if (model.physics == Physics::Elastic && model.kernel == KernelKind::HalfPlane) {
    throw OracleError("closed-form self integrals are available for full-plane kernels only");
  }
  const double a = seg.half_arc();
  const double lnint = 2.0 * (a * std::log(a) - a);  // ∫_{-a}^{a} ln|t| dt
  ElementIntegrals out;
  out.g = log_coef(model, mat, seg.center()) * lnint;
  if (model.physics == Physics::Elastic) {
    // Kelvin: the r,α r,β term is constant along the line.
    const Vec2 tau = seg.tangent(0.0).normalized();
    const double nu = mat.kernel_nu();
    const double kd = 1.0 / (8.0 * std::numbers::pi * mat.G() * (1.0 - nu));
    out.g += kd * 2.0 * a * tau * tau.transpose();
  }
  // r·n = 0 on the line and the odd part has zero principal value.
  return out;
}

BemSolution bem_solve(const BieModel& model) {
  model.validate();
  const int nu = model.outputs();
  const std::size_t ns = model.boundary.size();
  if (ns < 8) throw OracleError("bem_solve needs at least 8 elements");

  std::vector<Eigen::Index> u_idx(ns, -1);
  std::vector<Eigen::Index> t_idx(ns, -1);
  Eigen::Index n = 0;
  for (std::size_t s = 0; s < ns; ++s) {
    switch (model.boundary.segments[s].bc.kind) {
      case BcKind::Dirichlet: t_idx[s] = n; n += nu; break;
      case BcKind::Neumann: u_idx[s] = n; n += nu; break;
      case BcKind::Interface:
        u_idx[s] = n;
        t_idx[s] = n + nu;
        n += 2 * nu;
        break;
    }
  }
  const auto sources = source_points(model);
  const auto rows = static_cast<Eigen::Index>(sources.size()) * nu;
  if (rows != n) {
    throw OracleError("BEM system is not square: " + std::to_string(rows) + " equations, " +
                      std::to_string(n) + " unknowns");
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  for (const auto& sp : sources) {
    const Region& reg = model.regions[sp.region];
    const auto row = static_cast<Eigen::Index>(sp.row);
    const Segment& src = model.boundary.segments[sp.segment];
    const Eigen::MatrixXd C = sp.c * Eigen::MatrixXd::Identity(nu, nu);
    if (src.bc.kind == BcKind::Dirichlet) {
      rhs.segment(row, nu) -= C * data_at(model, src, sp.y).head(nu);
    } else {
      A.block(row, u_idx[sp.segment], nu, nu) += C;
    }
    for (const auto& rs : reg.segments) {
      const Segment& seg = model.boundary.segments[rs.segment];
      const bool self = rs.segment == sp.segment;
      ElementIntegrals ei;
      const bool closed_form = self && std::holds_alternative<LinePiece>(seg.curve) &&
                               !(model.physics == Physics::Elastic &&
                                 model.kernel == KernelKind::HalfPlane);
      ei = closed_form ? straight_self_integrals(model, reg.material, seg)
                       : element_integrals(model, reg.material, seg, rs.sign, sp.y, self);
      const Eigen::MatrixXd g = ei.g.topLeftCorner(nu, nu);
      const Eigen::MatrixXd h = ei.h.topLeftCorner(nu, nu);
      const Vec2 xc = seg.center();
      if (seg.bc.kind == BcKind::Dirichlet) {
        rhs.segment(row, nu) -= h * data_at(model, seg, xc).head(nu);
        A.block(row, t_idx[rs.segment], nu, nu) -= g;
      } else if (seg.bc.kind == BcKind::Neumann) {
        A.block(row, u_idx[rs.segment], nu, nu) += h;
        rhs.segment(row, nu) += g * data_at(model, seg, xc).head(nu);
      } else {
        A.block(row, u_idx[rs.segment], nu, nu) += h;
        A.block(row, t_idx[rs.segment], nu, nu) -= rs.sign * g;
      }
    }
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  BemSolution sol;
  sol.outputs = nu;
  sol.rcond = lu.rcond();
  if (!(sol.rcond > 1e-13)) {
    std::ostringstream os;
    os << "bem_solve: singular system (reciprocal condition " << sol.rcond
       << "); check the boundary-condition combination";
    throw OracleError(os.str());
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  sol.u.assign(ns, Vec2::Zero());
  sol.t.assign(ns, Vec2::Zero());
  for (std::size_t s = 0; s < ns; ++s) {
    const Segment& seg = model.boundary.segments[s];
    if (u_idx[s] >= 0) {
      sol.u[s].head(nu) = x.segment(u_idx[s], nu);
    } else {
      sol.u[s].head(nu) = data_at(model, seg, seg.center()).head(nu);
    }
    if (t_idx[s] >= 0) {
      sol.t[s].head(nu) = x.segment(t_idx[s], nu);
    } else {
      sol.t[s].head(nu) = data_at(model, seg, seg.center()).head(nu);
    }
  }
  return sol;
}

Vec2 bem_interior(const BieModel& model, const BemSolution& sol, std::size_t region,
                  const Vec2& y) {
  const Region& reg = model.regions.at(region);
  const int nu = model.outputs();
  Vec2 u = Vec2::Zero();
  for (const auto& rs : reg.segments) {
    const Segment& seg = model.boundary.segments[rs.segment];
    const ElementIntegrals ei = element_integrals(model, reg.material, seg, rs.sign, y, false);
    u.head(nu) += ei.g.topLeftCorner(nu, nu) * (rs.sign * sol.t[rs.segment].head(nu)) -
                  ei.h.topLeftCorner(nu, nu) * sol.u[rs.segment].head(nu);
  }
  return u;
}

void write_bem_csv(const std::string& path, const BieModel& model, const BemSolution& sol) {
  std::ofstream os(path);
  if (!os) throw OracleError("cannot open " + path);
  os.precision(17);
  os << "segment,x1,x2,u1,u2,t1,t2\n";
  for (std::size_t s = 0; s < model.boundary.size(); ++s) {
    const Vec2 c = model.boundary.segments[s].center();
    os << s << ',' << c.x() << ',' << c.y() << ',' << sol.u[s].x() << ',' << sol.u[s].y() << ','
       << sol.t[s].x() << ',' << sol.t[s].y() << '\n';
  }
}

}  // namespace binn
