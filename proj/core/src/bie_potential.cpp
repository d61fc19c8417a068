#include "binn/bie_potential.hpp"

#include <stdexcept>

namespace binn {

BieModel PotentialProblem::model() const {
  BieModel m;
  m.physics = Physics::Potential;
  m.boundary = boundary;
  m.ng = ng;
  Region r;
  for (std::size_t s = 0; s < boundary.size(); ++s) r.segments.push_back({s, 1});
  r.row_weight = boundary.size() ? 1.0 / static_cast<double>(boundary.size()) : 0.0;
  m.regions.push_back(std::move(r));
  return m;
}

std::vector<SourcePoint> source_points(const PotentialProblem& problem) {
  return source_points(problem.model());
}

double boundary_unknowns(const NetworkParams& params, const SegmentPoint& x, const Segment& seg) {
  switch (seg.bc.kind) {
    case BcKind::Dirichlet: {
      const auto out = forward_with_spatial_grad(params, x.x);
      return out.jacobian(0, 0) * x.normal.x() + out.jacobian(0, 1) * x.normal.y();
    }
    case BcKind::Neumann:
      return forward(params, x.x)[0];
    case BcKind::Interface:
      break;
  }
  throw std::invalid_argument("interface segments are invalid in single-region potential problems");
}

Eigen::MatrixXd network_channels(const NetworkParams& params, const EvalPoints& pts) {
  return channels_from_outputs(forward_batch(params, pts.coordinates()));
}

double residual(const PotentialProblem& problem, const NetworkParams& params,
                const SourcePoint& sp) {
  const BieModel m = problem.model();
  const EvalPoints pts = eval_points(m.boundary, m.ng);
  const Eigen::MatrixXd z = network_channels(params, pts);
  SourcePoint one = sp;
  one.row = 0;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(1);
  class Sink final : public TermSink {
   public:
    Sink(const Eigen::MatrixXd& z, Eigen::VectorXd& r) : z_(z), r_(r) {}
    void unknown(std::size_t, std::size_t point, const Eigen::MatrixXd& qmap,
                 const Eigen::Matrix2d& coef) override {
      r_[0] += coef(0, 0) * (qmap * z_.col(static_cast<Eigen::Index>(point)))[0];
    }
    void known(std::size_t, const Eigen::Vector2d& v) override { r_[0] += v[0]; }

   private:
    const Eigen::MatrixXd& z_;
    Eigen::VectorXd& r_;
  } sink(z, r);
  emit_residual_terms(m, pts, {one}, sink);
  return r[0];
}

Eigen::VectorXd residuals(const PotentialProblem& problem, const FieldFn& field) {
  const BieModel m = problem.model();
  return residual_direct(m, channels_from_field(eval_points(m.boundary, m.ng), field, 1));
}

Eigen::VectorXd residuals(const PotentialProblem& problem, const NetworkParams& params) {
  const BieModel m = problem.model();
  return residual_direct(m, network_channels(params, eval_points(m.boundary, m.ng)));
}

double loss(const PotentialProblem& problem, const NetworkParams& params) {
  const Eigen::VectorXd r = residuals(problem, params);
  return r.squaredNorm() / static_cast<double>(r.size());
}

std::vector<InteriorValue> interior_values(const PotentialProblem& problem,
                                           const NetworkParams& params,
                                           const std::vector<Vec2>& ys, int refine,
                                           double margin) {
  const BieModel m = problem.model();
  const Eigen::MatrixXd u = interior_direct(
      m, 0, ys, [&](const EvalPoints& pts) { return network_channels(params, pts); }, refine);
  std::vector<InteriorValue> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    out[i].value = u(0, static_cast<Eigen::Index>(i));
    out[i].distance = problem.boundary.distance_to(ys[i]);
    out[i].near_boundary = out[i].distance < margin;
  }
  return out;
}

InteriorValue interior_value(const PotentialProblem& problem, const NetworkParams& params,
                             const Vec2& y, int refine, double margin) {
  return interior_values(problem, params, {y}, refine, margin).front();
}

}  // namespace binn
