#include "binn/assembly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace binn {

namespace {

struct KernelPair {
  Eigen::Matrix2d us = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d ts = Eigen::Matrix2d::Zero();
};

KernelPair kernel(const BieModel& m, const Material& mat, const Vec2& x, const Vec2& y,
                  const Vec2& n) {
  KernelPair k;
  if (m.physics == Physics::Potential) {
    const PotentialKernel p = laplace_kernel(x, y, n);
    k.us(0, 0) = p.us;
    k.ts(0, 0) = p.dusdn;
    return k;
  }
  const ElasticKernel e = m.kernel == KernelKind::HalfPlane ? halfplane_kernel(x, y, n, mat)
                                                            : kelvin_kernel(x, y, n, mat);
  k.us = e.us;
  k.ts = e.ts;
  return k;
}

Eigen::Matrix2d log_coefficient(const BieModel& m, const Material& mat, const Vec2& y) {
  if (m.physics == Physics::Potential) {
    Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
    l(0, 0) = laplace_log_coefficient();
    return l;
  }
  return m.kernel == KernelKind::HalfPlane ? halfplane_log_coefficient(y, mat)
                                           : kelvin_log_coefficient(mat);
}

bool on_free_surface(const Vec2& y) { return std::abs(y.x()) <= 1e-12; }

Eigen::Vector2d boundary_data(const BieModel& m, const Segment& seg, const Vec2& x) {
  if (m.physics == Physics::Potential) {
    if (!seg.bc.scalar) throw std::invalid_argument("segment is missing scalar boundary data");
    return {seg.bc.scalar(x), 0.0};
  }
  if (!seg.bc.vector) throw std::invalid_argument("segment is missing vector boundary data");
  return seg.bc.vector(x);
}

// Routes kernel-weighted boundary quantities to known data or unknown
// channels according to the segment's boundary condition.
class Router {
 public:
  Router(const BieModel& m, const EvalPoints& pts, TermSink& sink) : m_(m), pts_(pts), sink_(sink) {}

  // coef · u(x): potential or displacement.
  void displacement(std::size_t row, const Segment& seg, std::size_t point, const Vec2& x,
                    const Vec2& n, const Material& mat, const Eigen::Matrix2d& coef) {
    if (seg.bc.kind == BcKind::Dirichlet) {
      sink_.known(row, coef * boundary_data(m_, seg, x));
    } else {
      sink_.unknown(row, point, quantity_map(Quantity::Value, n, mat, m_.outputs()), coef);
    }
  }

  // coef · t(x): flux or traction.
  void traction(std::size_t row, const Segment& seg, std::size_t point, const Vec2& x,
                const Vec2& n, const Material& mat, const Eigen::Matrix2d& coef) {
    switch (seg.bc.kind) {
      case BcKind::Neumann:
        sink_.known(row, coef * boundary_data(m_, seg, x));
        return;
      case BcKind::Dirichlet: {
        const Quantity q = m_.physics == Physics::Potential ? Quantity::Flux : Quantity::Traction;
        sink_.unknown(row, point, quantity_map(q, n, mat, m_.outputs()), coef);
        return;
      }
      case BcKind::Interface:
        sink_.unknown(row, point,
                      quantity_map(Quantity::Traction, n, m_.interface_material, m_.outputs()),
                      coef);
        return;
    }
  }

  const EvalPoints& points() const { return pts_; }

 private:
  const BieModel& m_;
  const EvalPoints& pts_;
  TermSink& sink_;
};

void emit_source(const BieModel& m, const EvalPoints& pts, const SourcePoint& sp,
                 const QuadratureRule& rule, const QuadratureRule& half, TermSink& sink) {
  const Region& region = m.regions[sp.region];
  const Material& mat = region.material;
  const Segment& src = m.boundary.segments[sp.segment];
  Router route(m, pts, sink);
  const Vec2& y = sp.y;

  int src_sign = 1;
  for (const auto& rs : region.segments) {
    if (rs.segment == sp.segment) src_sign = rs.sign;
  }
  const Vec2 src_n = src_sign * pts.points[pts.center(sp.segment)].normal;
  route.displacement(sp.row, src, pts.center(sp.segment), y, src_n, mat,
                     sp.c * Eigen::Matrix2d::Identity());

  const Eigen::Matrix2d L = log_coefficient(m, mat, y);
  const auto cw = cauchy_weights(rule);

  for (const auto& rs : region.segments) {
    const Segment& seg = m.boundary.segments[rs.segment];
    const bool self = rs.segment == sp.segment;
    const double a = seg.half_arc();
    WeakLogWeights wl;
    if (self) wl = weak_log_weights(rule, a);

    for (int i = 0; i < rule.order(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const std::size_t p = pts.node(rs.segment, i);
      const SegmentPoint& sp_i = pts.points[p];
      const Vec2 n = rs.sign * sp_i.normal;
      const KernelPair K = kernel(m, mat, sp_i.x, y, n);
      const double w = rule.weights[k] * sp_i.jacobian;

      // + ∫ t^s u dΓ. On the source segment the 1/r part is a principal
      // value: odd–even pairing with weights w_i/ξ_i applied to ξ·(kernel).
      const double wt = self ? cw[k] * rule.nodes[k] * sp_i.jacobian : w;
      route.displacement(sp.row, seg, p, sp_i.x, n, mat, wt * K.ts);

      // − ∫ u^s t dΓ.
      if (!self) {
        route.traction(sp.row, seg, p, sp_i.x, n, mat, -w * K.us);
        continue;
      }
      const double t = a * rule.nodes[k];
      route.traction(sp.row, seg, p, sp_i.x, n, mat, -wl.node[k] * L);
      const bool split = m.kernel == KernelKind::HalfPlane && seg.bc.kind == BcKind::Neumann;
      if (!split) route.traction(sp.row, seg, p, sp_i.x, n, mat, -w * (K.us - L * std::log(std::abs(t))));
    }
    if (!self) continue;
    route.traction(sp.row, seg, pts.center(rs.segment), y, src_n, mat, -wl.center * L);

    // The image kernel of a surface source jumps across the source (its
    // angle term), so the bounded remainder against known data is integrated
    // on the two halves separately.
    if (m.kernel == KernelKind::HalfPlane && seg.bc.kind == BcKind::Neumann) {
      for (int side = -1; side <= 1; side += 2) {
        for (int j = 0; j < half.order(); ++j) {
          const auto kj = static_cast<std::size_t>(j);
          const double xi = 0.5 * (half.nodes[kj] + side);
          const SegmentPoint q = seg.at(xi);
          const Vec2 n = rs.sign * q.normal;
          const KernelPair K = kernel(m, mat, q.x, y, n);
          const double w = 0.5 * half.weights[kj] * q.jacobian;
          const double t = a * xi;
          route.traction(sp.row, seg, 0, q.x, n, mat, -w * (K.us - L * std::log(std::abs(t))));
        }
      }
    }
  }
}

class AssemblySink final : public TermSink {
 public:
  AssemblySink(Eigen::MatrixXd& M, Eigen::VectorXd& b, int outputs)
      : M_(M), b_(b), nu_(outputs), ch_(3 * outputs) {}
  void unknown(std::size_t row, std::size_t point, const Eigen::MatrixXd& qmap,
               const Eigen::Matrix2d& coef) override {
    M_.block(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(point) * ch_, nu_, ch_) +=
        coef.topLeftCorner(nu_, nu_) * qmap;
  }
  void known(std::size_t row, const Eigen::Vector2d& value) override {
    b_.segment(static_cast<Eigen::Index>(row), nu_) += value.head(nu_);
  }

 private:
  Eigen::MatrixXd& M_;
  Eigen::VectorXd& b_;
  int nu_;
  int ch_;
};

class DirectSink final : public TermSink {
 public:
  DirectSink(const Eigen::MatrixXd& channels, Eigen::VectorXd& r, int outputs)
      : z_(channels), r_(r), nu_(outputs) {}
  void unknown(std::size_t row, std::size_t point, const Eigen::MatrixXd& qmap,
               const Eigen::Matrix2d& coef) override {
    r_.segment(static_cast<Eigen::Index>(row), nu_) +=
        coef.topLeftCorner(nu_, nu_) * (qmap * z_.col(static_cast<Eigen::Index>(point)));
  }
  void known(std::size_t row, const Eigen::Vector2d& value) override {
    r_.segment(static_cast<Eigen::Index>(row), nu_) += value.head(nu_);
  }

 private:
  const Eigen::MatrixXd& z_;
  Eigen::VectorXd& r_;
  int nu_;
};

}  // namespace

void BieModel::validate() const {
  if (regions.empty()) throw std::invalid_argument("problem has no regions");
  if (ng < 2 || ng % 2 != 0) {
    throw QuadratureError("n_g must be even (singular segments pair nodes about xi = 0), got " +
                          std::to_string(ng));
  }
  std::vector<int> uses(boundary.size(), 0);
  for (const auto& r : regions) {
    if (r.segments.empty()) throw std::invalid_argument("region without boundary segments");
    for (const auto& rs : r.segments) {
      if (rs.segment >= boundary.size()) throw std::invalid_argument("region segment out of range");
      if (rs.sign != 1 && rs.sign != -1) throw std::invalid_argument("segment sign must be +-1");
      ++uses[rs.segment];
    }
  }
  for (std::size_t s = 0; s < boundary.size(); ++s) {
    const auto kind = boundary.segments[s].bc.kind;
    if (kind == BcKind::Interface) {
      if (physics == Physics::Potential) {
        throw std::invalid_argument("interface segments are not supported for potential problems");
      }
      if (uses[s] != 2) {
        throw std::invalid_argument("interface segment " + std::to_string(s) +
                                    " must belong to exactly two regions");
      }
    } else if (uses[s] > 1) {
      throw std::invalid_argument("non-interface segment " + std::to_string(s) +
                                  " is shared between regions");
    }
  }
}

std::vector<SourcePoint> source_points(const BieModel& model) {
  std::vector<SourcePoint> out;
  std::size_t row = 0;
  for (std::size_t r = 0; r < model.regions.size(); ++r) {
    for (const auto& rs : model.regions[r].segments) {
      SourcePoint sp;
      sp.y = model.boundary.segments[rs.segment].center();
      sp.segment = rs.segment;
      sp.region = r;
      sp.c = 0.5;
      if (model.physics == Physics::Elastic && model.kernel == KernelKind::HalfPlane &&
          on_free_surface(sp.y)) {
        sp.c = 1.0;
      }
      sp.row = row;
      row += static_cast<std::size_t>(model.outputs());
      out.push_back(sp);
    }
  }
  return out;
}

Eigen::Matrix2Xd EvalPoints::coordinates() const {
  Eigen::Matrix2Xd c(2, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) c.col(static_cast<Eigen::Index>(i)) = points[i].x;
  return c;
}

EvalPoints eval_points(const Boundary& boundary, int ng) {
  const QuadratureRule rule = gauss_legendre(ng);
  EvalPoints e;
  e.ng = ng;
  e.segments = boundary.size();
  e.points.reserve(boundary.size() * static_cast<std::size_t>(ng + 1));
  for (const auto& seg : boundary.segments) {
    for (double xi : rule.nodes) e.points.push_back(seg.at(xi));
  }
  for (const auto& seg : boundary.segments) e.points.push_back(seg.at(0.0));
  return e;
}

Eigen::MatrixXd quantity_map(Quantity q, const Vec2& n, const Material& mat, int outputs) {
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(outputs, 3 * outputs);
  switch (q) {
    case Quantity::Value:
      for (int k = 0; k < outputs; ++k) F(k, 3 * k) = 1.0;
      break;
    case Quantity::Flux:
      if (outputs != 1) throw std::invalid_argument("flux requires a scalar field");
      F(0, 1) = n.x();
      F(0, 2) = n.y();
      break;
    case Quantity::Traction: {
      if (outputs != 2) throw std::invalid_argument("traction requires a 2-vector field");
      const double nu = mat.kernel_nu();
      const double G = mat.G();
      const double lambda = 2.0 * G * nu / (1.0 - 2.0 * nu);
      // t_β = G (∂_γ φ_β + ∂_β φ_γ) n_γ + λ (∂_δ φ_δ) n_β
      auto grad = [](int comp, int dir) { return 3 * comp + 1 + dir; };
      for (int b = 0; b < 2; ++b) {
        for (int g = 0; g < 2; ++g) {
          F(b, grad(b, g)) += G * n[g];
          F(b, grad(g, b)) += G * n[g];
          F(b, grad(g, g)) += lambda * n[b];
        }
      }
      break;
    }
  }
  return F;
}

void emit_residual_terms(const BieModel& model, const EvalPoints& pts,
                         const std::vector<SourcePoint>& sources, TermSink& sink) {
  model.validate();
  const QuadratureRule rule = gauss_legendre(model.ng);
  const QuadratureRule half = gauss_legendre(model.ng);
  for (const auto& sp : sources) emit_source(model, pts, sp, rule, half, sink);
}

void emit_interior_terms(const BieModel& model, const EvalPoints& pts, std::size_t region,
                         const Vec2& y, TermSink& sink) {
  const Region& reg = model.regions.at(region);
  const QuadratureRule rule = gauss_legendre(model.ng);
  Router route(model, pts, sink);
  for (const auto& rs : reg.segments) {
    const Segment& seg = model.boundary.segments[rs.segment];
    for (int i = 0; i < rule.order(); ++i) {
      const std::size_t p = pts.node(rs.segment, i);
      const SegmentPoint& q = pts.points[p];
      const Vec2 n = rs.sign * q.normal;
      const KernelPair K = kernel(model, reg.material, q.x, y, n);
      const double w = rule.weights[static_cast<std::size_t>(i)] * q.jacobian;
      route.traction(0, seg, p, q.x, n, reg.material, w * K.us);
      route.displacement(0, seg, p, q.x, n, reg.material, -w * K.ts);
    }
  }
}

Eigen::MatrixXd channels_from_outputs(const BatchOutputs& out) {
  const Eigen::Index nu = out.value.rows();
  const Eigen::Index n = out.value.cols();
  Eigen::MatrixXd z(3 * nu, n);
  for (Eigen::Index k = 0; k < nu; ++k) {
    z.row(3 * k) = out.value.row(k);
    z.row(3 * k + 1) = out.d1.row(k);
    z.row(3 * k + 2) = out.d2.row(k);
  }
  return z;
}

Eigen::MatrixXd channels_from_field(const EvalPoints& pts, const FieldFn& field, int outputs) {
  Eigen::MatrixXd z(3 * outputs, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const SpatialOutput f = field(pts.points[p].x);
    for (int k = 0; k < outputs; ++k) {
      z(3 * k, static_cast<Eigen::Index>(p)) = f.value[k];
      z(3 * k + 1, static_cast<Eigen::Index>(p)) = f.jacobian(k, 0);
      z(3 * k + 2, static_cast<Eigen::Index>(p)) = f.jacobian(k, 1);
    }
  }
  return z;
}

Eigen::VectorXd ResidualOperator::residual(const Eigen::MatrixXd& channels) const {
  const Eigen::Map<const Eigen::VectorXd> z(channels.data(), channels.size());
  return M * z + b;
}

ResidualOperator assemble(const BieModel& model) {
  ResidualOperator op;
  op.outputs = model.outputs();
  op.points = eval_points(model.boundary, model.ng);
  op.sources = source_points(model);
  const auto rows = static_cast<Eigen::Index>(op.sources.size()) * op.outputs;
  op.M = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(op.points.size()) * model.channels());
  op.b = Eigen::VectorXd::Zero(rows);
  op.weights.resize(rows);
  for (const auto& sp : op.sources) {
    op.weights.segment(static_cast<Eigen::Index>(sp.row), op.outputs)
        .setConstant(model.regions[sp.region].row_weight);
  }
  AssemblySink sink(op.M, op.b, op.outputs);
  emit_residual_terms(model, op.points, op.sources, sink);
  return op;
}

Eigen::VectorXd residual_direct(const BieModel& model, const Eigen::MatrixXd& channels) {
  const auto sources = source_points(model);
  const EvalPoints pts = eval_points(model.boundary, model.ng);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sources.size()) * model.outputs());
  DirectSink sink(channels, r, model.outputs());
  emit_residual_terms(model, pts, sources, sink);
  return r;
}

BieModel refined_model(const BieModel& model, int k) {
  BieModel out = model;
  out.boundary = model.boundary.refined(k);
  for (auto& r : out.regions) {
    std::vector<RegionSegment> segs;
    for (const auto& rs : r.segments) {
      for (int j = 0; j < k; ++j) {
        // Pieces of a reversed segment are visited in reverse to keep the
        // region's traversal order.
        const int jj = rs.sign > 0 ? j : k - 1 - j;
        segs.push_back({rs.segment * static_cast<std::size_t>(k) + static_cast<std::size_t>(jj), rs.sign});
      }
    }
    r.segments = std::move(segs);
  }
  return out;
}

Eigen::MatrixXd interior_direct(const BieModel& model, std::size_t region,
                                const std::vector<Vec2>& ys, const ChannelSource& channels,
                                int refine) {
  if (refine < 1) throw std::invalid_argument("refinement factor must be >= 1");
  const BieModel m = refine > 1 ? refined_model(model, refine) : model;
  const EvalPoints pts = eval_points(m.boundary, m.ng);
  const Eigen::MatrixXd z = channels(pts);
  Eigen::MatrixXd out(m.outputs(), static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m.outputs());
    DirectSink sink(z, u, m.outputs());
    emit_interior_terms(m, pts, region, ys[i], sink);
    out.col(static_cast<Eigen::Index>(i)) = u;
  }
  return out;
}

}  // namespace binn
