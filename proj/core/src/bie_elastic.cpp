#include "binn/bie_elastic.hpp"

#include <limits>
#include <stdexcept>

namespace binn {

namespace {

Eigen::VectorXd direct_rows(const BieModel& m, const NetworkParams& params,
                            const SourcePoint& sp) {
  const EvalPoints pts = eval_points(m.boundary, m.ng);
  const Eigen::MatrixXd z = network_channels(params, pts);
  SourcePoint one = sp;
  one.row = 0;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m.outputs());
  class Sink final : public TermSink {
   public:
    Sink(const Eigen::MatrixXd& z, Eigen::VectorXd& r) : z_(z), r_(r) {}
    void unknown(std::size_t, std::size_t point, const Eigen::MatrixXd& qmap,
                 const Eigen::Matrix2d& coef) override {
      r_ += coef * (qmap * z_.col(static_cast<Eigen::Index>(point)));
    }
    void known(std::size_t, const Eigen::Vector2d& v) override { r_ += v; }

   private:
    const Eigen::MatrixXd& z_;
    Eigen::VectorXd& r_;
  } sink(z, r);
  emit_residual_terms(m, pts, {one}, sink);
  return r;
}

double boundary_distance(const ElasticProblem& p, std::size_t region, const Vec2& y) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& rs : p.regions.at(region).segments) {
    d = std::min(d, p.boundary.segments[rs.segment].distance_to(y));
  }
  return d;
}

}  // namespace

BieModel ElasticProblem::model() const {
  BieModel m;
  m.physics = Physics::Elastic;
  m.kernel = kernel;
  m.boundary = boundary;
  m.regions = regions;
  m.interface_material = interface_material;
  m.ng = ng;
  if (!(beta > 0.0)) throw std::invalid_argument("interface weight beta must be positive");
  if (regions.size() > 2) throw std::invalid_argument("at most two elastic regions are supported");
  for (std::size_t r = 0; r < m.regions.size(); ++r) {
    const double n = static_cast<double>(m.regions[r].segments.size());
    m.regions[r].row_weight = (r == 0 ? 1.0 : beta) / n;
  }
  return m;
}

ElasticProblem single_region(const Boundary& boundary, const Material& mat, KernelKind kernel,
                             int ng) {
  ElasticProblem p;
  p.boundary = boundary;
  p.kernel = kernel;
  p.ng = ng;
  p.interface_material = mat;
  Region r;
  r.material = mat;
  for (std::size_t s = 0; s < boundary.size(); ++s) r.segments.push_back({s, 1});
  p.regions.push_back(std::move(r));
  return p;
}

StressState stress_state(const Eigen::Matrix2d& grad, const Material& mat) {
  if (mat.nu >= 0.5) {
    throw std::invalid_argument("incompressible material (nu = 0.5) is not supported");
  }
  const double nu = mat.kernel_nu();
  const double G = mat.G();
  StressState s;
  s.eps = 0.5 * (grad + grad.transpose());
  s.sigma = 2.0 * G * s.eps +
            (2.0 * G * nu / (1.0 - 2.0 * nu)) * s.eps.trace() * Eigen::Matrix2d::Identity();
  return s;
}

Vec2 traction_from_net(const NetworkParams& params, const Vec2& x, const Vec2& n,
                       const Material& mat) {
  if (params.arch.outputs != 2) throw std::invalid_argument("elastic network needs 2 outputs");
  const SpatialOutput out = forward_with_spatial_grad(params, x);
  return stress_state(out.jacobian, mat).sigma * n;
}

std::vector<SourcePoint> source_points(const ElasticProblem& problem) {
  return source_points(problem.model());
}

Vec2 residual_elastic(const ElasticProblem& problem, const NetworkParams& params,
                      const SourcePoint& sp) {
  return direct_rows(problem.model(), params, sp);
}

Vec2 residual_multidomain(const ElasticProblem& problem, const NetworkParams& params,
                          const SourcePoint& sp, int region_id) {
  if (region_id != 1 && region_id != 2) {
    throw std::invalid_argument("region_id must be 1 (matrix) or 2 (inclusion)");
  }
  if (problem.regions.size() != 2) throw std::invalid_argument("problem has no inclusion region");
  SourcePoint s = sp;
  s.region = static_cast<std::size_t>(region_id - 1);
  return direct_rows(problem.model(), params, s);
}

Eigen::VectorXd residuals(const ElasticProblem& problem, const FieldFn& field) {
  const BieModel m = problem.model();
  return residual_direct(m, channels_from_field(eval_points(m.boundary, m.ng), field, 2));
}

Eigen::VectorXd residuals(const ElasticProblem& problem, const NetworkParams& params) {
  const BieModel m = problem.model();
  return residual_direct(m, network_channels(params, eval_points(m.boundary, m.ng)));
}

double loss_elastic(const ElasticProblem& problem, const NetworkParams& params) {
  const BieModel m = problem.model();
  const Eigen::VectorXd r = residual_direct(m, network_channels(params, eval_points(m.boundary, m.ng)));
  double l = 0.0;
  for (const auto& sp : source_points(m)) {
    l += m.regions[sp.region].row_weight *
         r.segment(static_cast<Eigen::Index>(sp.row), 2).squaredNorm();
  }
  return l;
}

double loss_multidomain(const ElasticProblem& problem, const NetworkParams& params) {
  if (problem.regions.size() != 2) throw std::invalid_argument("problem has no inclusion region");
  return loss_elastic(problem, params);
}

std::vector<InteriorDisplacement> interior_displacements(
    const ElasticProblem& problem, const NetworkParams& params, const std::vector<Vec2>& ys,
    std::size_t region, int refine, double margin) {
  const BieModel m = problem.model();
  const Eigen::MatrixXd u = interior_direct(
      m, region, ys, [&](const EvalPoints& pts) { return network_channels(params, pts); },
      refine);
  std::vector<InteriorDisplacement> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    out[i].value = u.col(static_cast<Eigen::Index>(i));
    out[i].distance = boundary_distance(problem, region, ys[i]);
    out[i].near_boundary = out[i].distance < margin;
  }
  return out;
}

InteriorDisplacement interior_displacement(const ElasticProblem& problem,
                                           const NetworkParams& params, const Vec2& y,
                                           std::size_t region, int refine, double margin) {
  return interior_displacements(problem, params, {y}, region, refine, margin).front();
}

}  // namespace binn
