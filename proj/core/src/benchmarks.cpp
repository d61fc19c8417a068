#include "binn/benchmarks.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace binn {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd channel_vector(const SpatialOutput& f) {
  const auto n = f.value.size();
  Eigen::VectorXd z(3 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    z(3 * k) = f.value(k);
    z(3 * k + 1) = f.jacobian(k, 0);
    z(3 * k + 2) = f.jacobian(k, 1);
  }
  return z;
}

const Material& segment_material(const BieModel& model, std::size_t seg) {
  for (const auto& r : model.regions) {
    for (const auto& rs : r.segments) {
      if (rs.segment == seg) return r.material;
    }
  }
  throw std::invalid_argument("segment belongs to no region");
}

SpatialOutput scalar_output(double v, double d1, double d2) {
  SpatialOutput o;
  o.value = Eigen::VectorXd::Constant(1, v);
  o.jacobian.resize(1, 2);
  o.jacobian << d1, d2;
  return o;
}

// Reference boundary unknowns evaluated from a closed-form field.
BoundaryReference field_boundary(const BieModel& model, FieldFn field) {
  return [model, field](std::size_t seg, const SegmentPoint& p) {
    return boundary_unknown(model, seg, p, field(p.x));
  };
}

std::vector<Vec2> grid_points(double lo1, double hi1, double lo2, double hi2, int n1, int n2,
                              const std::function<bool(const Vec2&)>& keep) {
  std::vector<Vec2> out;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const Vec2 p(lo1 + (hi1 - lo1) * i / (n1 - 1), lo2 + (hi2 - lo2) * j / (n2 - 1));
      if (keep(p)) out.push_back(p);
    }
  }
  return out;
}

}  // namespace

Architecture Benchmark::architecture(int width, int blocks) const {
  Architecture a;
  a.width = width;
  a.blocks = blocks;
  a.outputs = physics == Physics::Potential ? 1 : 2;
  a.validate();
  return a;
}

Eigen::VectorXd boundary_unknown(const BieModel& model, std::size_t segment,
                                 const SegmentPoint& p, const SpatialOutput& field) {
  const int nu = model.outputs();
  const Segment& seg = model.boundary.segments.at(segment);
  const Eigen::VectorXd z = channel_vector(field);
  switch (seg.bc.kind) {
    case BcKind::Neumann:
      return field.value.head(nu);
    case BcKind::Dirichlet: {
      if (model.physics == Physics::Potential) {
        return quantity_map(Quantity::Flux, p.normal, Material{}, 1) * z;
      }
      const Material& mat = segment_material(model, segment);
      return quantity_map(Quantity::Traction, p.normal, mat, 2) * z;
    }
    case BcKind::Interface: {
      Eigen::VectorXd out(2 * nu);
      out.head(nu) = field.value.head(nu);
      out.tail(nu) = quantity_map(Quantity::Traction, p.normal, model.interface_material, nu) * z;
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------- flower

SpatialOutput flower_solution(const Vec2& x) {
  const double s1 = std::sin(x.x()), c1 = std::cos(x.x());
  const double sh = std::sinh(x.y()), ch = std::cosh(x.y());
  return scalar_output(s1 * sh + c1 * ch, c1 * sh - s1 * ch, s1 * ch + c1 * sh);
}

Benchmark make_flower(int ng) {
  constexpr int kPetals = 5;
  const double circumradius = 1.0 / std::sin(kPi / 5.0);
  std::vector<Vec2> v;
  for (int k = 0; k < kPetals; ++k) {
    const double ang = kPi / 2.0 + 2.0 * kPi * k / kPetals;
    v.emplace_back(circumradius * std::cos(ang), circumradius * std::sin(ang));
  }
  const auto dirichlet =
      BoundaryCondition::dirichlet(ScalarField([](const Vec2& x) { return flower_solution(x).value(0); }));
  LoopSpec loop;
  std::vector<Vec2> mids;
  for (int k = 0; k < kPetals; ++k) {
    const Vec2& a = v[static_cast<std::size_t>(k)];
    const Vec2& b = v[static_cast<std::size_t>((k + 1) % kPetals)];
    const Vec2 m = 0.5 * (a + b);
    mids.push_back(m);
    const double start = std::atan2(a.y() - m.y(), a.x() - m.x());
    loop.pieces.push_back(arc_piece(m, 1.0, start, start + kPi, 20, dirichlet));
  }
  Benchmark b;
  b.name = "flower";
  b.physics = Physics::Potential;
  b.default_iterations = 20000;
  b.potential.boundary = build_boundary({{loop}});
  b.potential.ng = ng;

  // Inside the flower: inside the pentagon or inside one of the petal discs.
  const auto inside = [v, mids](const Vec2& p) {
    bool in_pentagon = true;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec2 e = v[(k + 1) % v.size()] - v[k];
      const Vec2 w = p - v[k];
      if (e.x() * w.y() - e.y() * w.x() < 0.0) in_pentagon = false;
    }
    if (in_pentagon) return true;
    for (const auto& m : mids) {
      if ((p - m).norm() < 1.0) return true;
    }
    return false;
  };
  const Boundary& bd = b.potential.boundary;
  ReferenceSolution& ref = b.reference;
  ref.field = flower_solution;
  ref.interior = [](const Vec2& x) { return flower_solution(x).value; };
  ref.boundary = field_boundary(b.potential.model(), flower_solution);
  ref.grid = grid_points(-2.4, 2.4, -2.4, 2.4, 97, 97, [&](const Vec2& p) {
    return inside(p) && bd.distance_to(p) >= kDefaultMargin;
  });
  ref.path = trajectory(bd, 2000);
  return b;
}

// ------------------------------------------------------------ cylinder flow

SpatialOutput flow_perturbation(const Vec2& x) {
  constexpr double k = 1.5 * 1.5 * 3.0;
  const double r2 = x.squaredNorm();
  const double r4 = r2 * r2;
  return scalar_output(k * x.x() / r2, k * (r2 - 2.0 * x.x() * x.x()) / r4,
                       -2.0 * k * x.x() * x.y() / r4);
}

Benchmark make_cylinder_flow(int ng) {
  constexpr double radius = 1.5;
  // q̄ = −v₀·n with the normal pointing into the cylinder.
  const auto neumann = BoundaryCondition::neumann(
      ScalarField([](const Vec2& x) { return 3.0 * x.x() / x.norm(); }));
  LoopSpec loop{{circle_piece(Vec2::Zero(), radius, 40, true, neumann)}, true};
  Benchmark b;
  b.name = "flow";
  b.physics = Physics::Potential;
  b.default_iterations = 10000;
  b.potential.boundary = build_boundary({{loop}});
  b.potential.domain = DomainKind::Exterior;
  b.potential.ng = ng;
  ReferenceSolution& ref = b.reference;
  ref.field = flow_perturbation;
  ref.interior = [](const Vec2& x) { return flow_perturbation(x).value; };
  ref.boundary = field_boundary(b.potential.model(), flow_perturbation);
  ref.grid = grid_points(-10.0, 10.0, -10.0, 10.0, 41, 41,
                         [](const Vec2& p) { return p.norm() >= radius + kDefaultMargin; });
  ref.path = trajectory(b.potential.boundary, 1000);
  return b;
}

// ------------------------------------------------------------------- beam

namespace {
constexpr double kBeamL = 2.0;
constexpr double kBeamD = 2.0;
constexpr double kBeamP = 1.0;
constexpr double kBeamE = 1.0;
constexpr double kBeamNu = 0.3;
constexpr double kBeamI = kBeamD * kBeamD * kBeamD / 12.0;
}  // namespace

SpatialOutput beam_solution(const Vec2& x) {
  const double x1 = x.x(), x2 = x.y();
  const double k = kBeamP / (6.0 * kBeamE * kBeamI);
  const double L = kBeamL, nu = kBeamNu, dd = kBeamD * kBeamD / 4.0;
  SpatialOutput o;
  o.value.resize(2);
  o.jacobian.resize(2, 2);
  o.value(0) = -k * x2 * ((6.0 * L - 3.0 * x1) * x1 + (2.0 + nu) * (x2 * x2 - dd));
  o.value(1) = k * (3.0 * nu * x2 * x2 * (L - x1) + (4.0 + 5.0 * nu) * kBeamD * kBeamD * x1 / 4.0 +
                    (3.0 * L - x1) * x1 * x1);
  o.jacobian(0, 0) = -k * x2 * (6.0 * L - 6.0 * x1);
  o.jacobian(0, 1) = -k * ((6.0 * L - 3.0 * x1) * x1 + (2.0 + nu) * (3.0 * x2 * x2 - dd));
  o.jacobian(1, 0) = k * (-3.0 * nu * x2 * x2 + (4.0 + 5.0 * nu) * kBeamD * kBeamD / 4.0 +
                          6.0 * L * x1 - 3.0 * x1 * x1);
  o.jacobian(1, 1) = k * 6.0 * nu * x2 * (L - x1);
  return o;
}

Eigen::Matrix2d beam_stress(const Vec2& x) {
  const double s11 = -kBeamP * (kBeamL - x.x()) * x.y() / kBeamI;
  const double s12 = kBeamP / (2.0 * kBeamI) * (kBeamD * kBeamD / 4.0 - x.y() * x.y());
  Eigen::Matrix2d s;
  s << s11, s12, s12, 0.0;
  return s;
}

Benchmark make_beam(int ng) {
  const auto traction = [](Vec2 n) {
    return BoundaryCondition::neumann(VectorField([n](const Vec2& x) -> Vec2 { return beam_stress(x) * n; }));
  };
  const auto fixed = BoundaryCondition::dirichlet(
      VectorField([](const Vec2& x) -> Vec2 { return beam_solution(x).value; }));
  const double h = kBeamD / 2.0;
  LoopSpec loop{{line_piece({0.0, -h}, {kBeamL, -h}, 20, traction({0.0, -1.0})),
                 line_piece({kBeamL, -h}, {kBeamL, h}, 20, traction({1.0, 0.0})),
                 line_piece({kBeamL, h}, {0.0, h}, 20, traction({0.0, 1.0})),
                 line_piece({0.0, h}, {0.0, -h}, 20, fixed)},
                true};
  Benchmark b;
  b.name = "beam";
  b.physics = Physics::Elastic;
  b.default_iterations = 20000;
  b.elastic = single_region(build_boundary({{loop}}),
                            Material::make(kBeamE, kBeamNu, PlaneCondition::PlaneStress),
                            KernelKind::FullPlane, ng);
  ReferenceSolution& ref = b.reference;
  ref.field = beam_solution;
  ref.interior = [](const Vec2& x) { return beam_solution(x).value; };
  ref.boundary = field_boundary(b.elastic.model(), beam_solution);
  const double m = kDefaultMargin + 0.02;
  ref.grid = grid_points(m, kBeamL - m, -h + m, h - m, 39, 39, [](const Vec2&) { return true; });
  ref.path = trajectory(b.elastic.boundary, 4000);
  return b;
}

// ------------------------------------------------------------------ Hertz

double hertz_pressure(double x2) {
  const double s = 1.0 - x2 * x2;
  return s > 0.0 ? 2.0 / kPi * std::sqrt(s) : 0.0;
}

Vec2 hertz_displacement(const Vec2& y, const Material& mat) {
  if (y.x() < 0.0) throw std::invalid_argument("hertz_displacement: point outside the half-plane");
  // s = sin φ absorbs the square-root edge behaviour of the pressure.
  const bool on_patch = y.x() == 0.0 && std::abs(y.y()) <= 1.0;
  const double star = on_patch ? std::asin(y.y()) : 0.0;
  const Singularity kind = on_patch ? Singularity::Log : Singularity::None;
  Vec2 u;
  for (int c = 0; c < 2; ++c) {
    u[c] = adaptive_integral(
        [&](double phi) {
          const double s = std::sin(phi);
          const Vec2 load(0.0, s);
          if ((load - y).norm() < kCoincidentTolerance) return 0.0;
          const double w = 2.0 / kPi * std::cos(phi) * std::cos(phi);
          return w * flamant_displacement(load, y, mat)[c];
        },
        -kPi / 2.0, kPi / 2.0, kind, star);
  }
  return u;
}

Benchmark make_hertz(int ng) {
  const auto pressure = BoundaryCondition::neumann(
      VectorField([](const Vec2& x) -> Vec2 { return {hertz_pressure(x.y()), 0.0}; }));
  LoopSpec patch{{line_piece({0.0, 1.0}, {0.0, -1.0}, 20, pressure)}, false};
  Benchmark b;
  b.name = "hertz";
  b.physics = Physics::Elastic;
  b.default_iterations = 10000;
  const Material mat = Material::make(1.0, 0.3, PlaneCondition::PlaneStrain);
  b.elastic = single_region(build_boundary({{patch}}), mat, KernelKind::HalfPlane, ng);
  ReferenceSolution& ref = b.reference;
  // Only the displacement is tabulated; the Jacobian is left at zero.
  ref.field = [mat](const Vec2& x) {
    SpatialOutput o;
    o.value = hertz_displacement(x, mat);
    o.jacobian = Eigen::Matrix2d::Zero();
    return o;
  };
  ref.interior = [mat](const Vec2& x) -> Eigen::VectorXd { return hertz_displacement(x, mat); };
  ref.boundary = [mat](std::size_t, const SegmentPoint& p) -> Eigen::VectorXd {
    return hertz_displacement(p.x, mat);
  };
  const Boundary& bd = b.elastic.boundary;
  ref.grid = grid_points(0.1, 4.0, -2.0, 2.0, 40, 41,
                         [&](const Vec2& p) { return bd.distance_to(p) >= kDefaultMargin; });
  ref.path = trajectory(bd, 1000);
  return b;
}

// -------------------------------------------------------------- inclusion

ElasticProblem inclusion_problem(const InclusionSetup& s) {
  const Material m1 = Material::make(s.E1, 0.3, PlaneCondition::PlaneStrain);
  const Material m2 = Material::make(s.E2, 0.3, PlaneCondition::PlaneStrain);
  const auto free = BoundaryCondition::neumann(VectorField([](const Vec2&) -> Vec2 { return Vec2::Zero(); }));
  const auto pull = BoundaryCondition::neumann(VectorField([](const Vec2&) -> Vec2 { return {1.0, 0.0}; }));
  const auto clamp = BoundaryCondition::dirichlet(VectorField([](const Vec2&) -> Vec2 { return Vec2::Zero(); }));
  constexpr double h = 2.5;
  LoopSpec plate{{line_piece({-h, -h}, {h, -h}, s.per_edge, free),
                  line_piece({h, -h}, {h, h}, s.per_edge, pull),
                  line_piece({h, h}, {-h, h}, s.per_edge, free),
                  line_piece({-h, h}, {-h, -h}, s.per_edge, clamp)},
                 true};
  LoopSpec circle{{circle_piece(Vec2::Zero(), 1.0, s.interface, false, BoundaryCondition::interface())},
                  true};
  ElasticProblem p;
  p.boundary = build_boundary({{plate, circle}});
  p.kernel = KernelKind::FullPlane;
  p.interface_material = m2;
  p.beta = s.beta;
  p.ng = s.ng;
  Region matrix{m1, {}, 1.0};
  Region inclusion{m2, {}, 1.0};
  const std::size_t plate_count = 4 * static_cast<std::size_t>(s.per_edge);
  for (std::size_t i = 0; i < p.boundary.size(); ++i) {
    if (i < plate_count) {
      matrix.segments.push_back({i, 1});
    } else {
      matrix.segments.push_back({i, -1});
      inclusion.segments.push_back({i, 1});
    }
  }
  p.regions = {matrix, inclusion};
  return p;
}

InclusionOracle solve_inclusion_oracle(const InclusionSetup& setup) {
  InclusionOracle o;
  o.model = inclusion_problem(setup).model();
  o.solution = bem_solve(o.model);
  for (std::size_t i = 0; i < o.model.boundary.size(); ++i) {
    if (o.model.boundary.segments[i].bc.kind == BcKind::Interface) o.interface.push_back(i);
  }
  return o;
}

Benchmark make_inclusion(int ng, bool with_oracle) {
  InclusionSetup net;
  net.ng = ng;
  Benchmark b;
  b.name = "inclusion";
  b.physics = Physics::Elastic;
  b.default_iterations = 50000;
  b.elastic = inclusion_problem(net);
  std::vector<std::size_t> iface;
  for (std::size_t i = 0; i < b.elastic.boundary.size(); ++i) {
    if (b.elastic.boundary.segments[i].bc.kind == BcKind::Interface) iface.push_back(i);
  }
  ReferenceSolution& ref = b.reference;
  const Boundary& bd = b.elastic.boundary;
  ref.grid = grid_points(-2.4, 2.4, -2.4, 2.4, 25, 25, [&](const Vec2& p) {
    return p.norm() > 1.0 && bd.distance_to(p) >= kDefaultMargin;
  });
  ref.grid_region = 0;
  InclusionSetup fine = net;
  fine.per_edge = 96;
  fine.interface = 128;
  ref.path = trajectory(bd, static_cast<std::size_t>(fine.interface), iface);
  if (!with_oracle) return b;

  auto oracle = std::make_shared<const InclusionOracle>(solve_inclusion_oracle(fine));
  ref.boundary = [oracle](std::size_t, const SegmentPoint& p) -> Eigen::VectorXd {
    // Constant elements: take the interface element nearest to the point.
    std::size_t best = oracle->interface.front();
    double dmin = std::numeric_limits<double>::infinity();
    for (auto i : oracle->interface) {
      const double d = (oracle->model.boundary.segments[i].center() - p.x).norm();
      if (d < dmin) {
        dmin = d;
        best = i;
      }
    }
    Eigen::VectorXd v(4);
    v << oracle->solution.u[best], oracle->solution.t[best];
    return v;
  };
  ref.interior = [oracle](const Vec2& y) -> Eigen::VectorXd {
    return bem_interior(oracle->model, oracle->solution, 0, y);
  };
  return b;
}

std::vector<std::string> benchmark_names() { return {"flower", "flow", "beam", "hertz", "inclusion"}; }

std::optional<Benchmark> make_benchmark(const std::string& name, int ng) {
  if (name == "flower") return make_flower(ng);
  if (name == "flow" || name == "cylinder_flow") return make_cylinder_flow(ng);
  if (name == "beam") return make_beam(ng);
  if (name == "hertz") return make_hertz(ng);
  if (name == "inclusion") return make_inclusion(ng);
  return std::nullopt;
}

// ---------------------------------------------------------------- metrics

ErrorMetrics error_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref) {
  if (pred.rows() != ref.rows() || pred.cols() != ref.cols()) {
    throw std::invalid_argument("error_metrics: prediction and reference sample counts differ");
  }
  ErrorMetrics m;
  const Eigen::MatrixXd d = pred - ref;
  m.abs_error.resize(static_cast<std::size_t>(d.cols()));
  for (Eigen::Index j = 0; j < d.cols(); ++j) m.abs_error[static_cast<std::size_t>(j)] = d.col(j).norm();
  m.abs_l2 = d.norm();
  const double rn = ref.norm();
  if (rn == 0.0) {
    m.relative = false;
    m.rel_l2 = std::numeric_limits<double>::quiet_NaN();
  } else {
    m.rel_l2 = m.abs_l2 / rn;
  }
  return m;
}

ErrorMetrics error_metrics(std::span<const double> pred, std::span<const double> ref) {
  if (pred.size() != ref.size()) {
    throw std::invalid_argument("error_metrics: prediction and reference sample counts differ");
  }
  const auto n = static_cast<Eigen::Index>(pred.size());
  return error_metrics(Eigen::MatrixXd(Eigen::Map<const Eigen::RowVectorXd>(pred.data(), n)),
                       Eigen::MatrixXd(Eigen::Map<const Eigen::RowVectorXd>(ref.data(), n)));
}

Evaluation evaluate(const Benchmark& bench, const NetworkParams& params, int refine) {
  const BieModel model = bench.model();
  const ReferenceSolution& ref = bench.reference;
  Evaluation ev;
  const auto np = static_cast<Eigen::Index>(ref.path.size());
  for (Eigen::Index j = 0; j < np; ++j) {
    const auto& smp = ref.path[static_cast<std::size_t>(j)];
    const SegmentPoint p = model.boundary.segments[smp.segment].at(smp.xi);
    const Eigen::VectorXd pred = boundary_unknown(model, smp.segment, p, forward_with_spatial_grad(params, p.x));
    const Eigen::VectorXd want = ref.boundary ? ref.boundary(smp.segment, p) : Eigen::VectorXd::Zero(pred.size());
    if (j == 0) {
      ev.boundary_pred.resize(pred.size(), np);
      ev.boundary_ref.resize(pred.size(), np);
    }
    ev.boundary_pred.col(j) = pred;
    ev.boundary_ref.col(j) = want;
    ev.s.push_back(smp.s);
    ev.path_points.push_back(p.x);
  }
  ev.boundary = error_metrics(ev.boundary_pred, ev.boundary_ref);

  ev.interior_pred = interior_direct(
      model, ref.grid_region, ref.grid,
      [&](const EvalPoints& pts) { return network_channels(params, pts); }, refine);
  ev.interior_ref.resize(ev.interior_pred.rows(), ev.interior_pred.cols());
  for (std::size_t i = 0; i < ref.grid.size(); ++i) {
    ev.interior_ref.col(static_cast<Eigen::Index>(i)) =
        ref.interior ? ref.interior(ref.grid[i]) : Eigen::VectorXd::Zero(ev.interior_pred.rows());
  }
  ev.interior = error_metrics(ev.interior_pred, ev.interior_ref);
  return ev;
}

namespace {

void write_row(std::ofstream& os, const Eigen::VectorXd& a, const Eigen::VectorXd& b, double err) {
  for (Eigen::Index k = 0; k < a.size(); ++k) os << ',' << a(k);
  for (Eigen::Index k = 0; k < b.size(); ++k) os << ',' << b(k);
  os << ',' << err << '\n';
}

void write_header(std::ofstream& os, Eigen::Index comps) {
  for (Eigen::Index k = 0; k < comps; ++k) os << ",value" << k;
  for (Eigen::Index k = 0; k < comps; ++k) os << ",reference" << k;
  os << ",abs_error\n";
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  return os;
}

}  // namespace

void write_boundary_csv(const std::string& path, const Evaluation& ev) {
  auto os = open_csv(path);
  os << "s,x1,x2";
  write_header(os, ev.boundary_pred.rows());
  for (std::size_t j = 0; j < ev.s.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    os << ev.s[j] << ',' << ev.path_points[j].x() << ',' << ev.path_points[j].y();
    write_row(os, ev.boundary_pred.col(c), ev.boundary_ref.col(c), ev.boundary.abs_error[j]);
  }
}

void write_interior_csv(const std::string& path, const Benchmark& bench, const Evaluation& ev) {
  auto os = open_csv(path);
  os << "x1,x2";
  write_header(os, ev.interior_pred.rows());
  const auto& g = bench.reference.grid;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    os << g[j].x() << ',' << g[j].y();
    write_row(os, ev.interior_pred.col(c), ev.interior_ref.col(c), ev.interior.abs_error[j]);
  }
}

}  // namespace binn
