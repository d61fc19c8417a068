// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any criterion fails. `--only 1,6` restricts the run during development.

#include "binn/benchmarks.hpp"
#include "binn/oracle.hpp"
#include "binn/training.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

using namespace binn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ------------------------------------------------------------- trained runs

struct Trained {
  Benchmark bench;
  NetworkParams params;
  double final_loss = 0.0;
  double seconds = 0.0;
  bool aborted = false;
};

Trained train_benchmark(Benchmark bench) {
  const auto t0 = Clock::now();
  const ResidualOperator op = assemble(bench.model());
  TrainConfig cfg;
  cfg.iterations = bench.default_iterations;
  cfg.lr = bench.default_lr;
  cfg.seed = 1;
  const TrainResult r = train(op, bench.architecture(), cfg);
  Trained t;
  t.params = r.params;
  t.final_loss = r.loss_history.empty() ? NAN : r.loss_history.back();
  t.aborted = r.aborted;
  t.seconds = seconds_since(t0);
  t.bench = std::move(bench);
  std::printf("  trained %s: %d iterations, lr %g, final loss %.3e, %.1f s%s\n", t.bench.name.c_str(),
              cfg.iterations, cfg.lr, t.final_loss, t.seconds, t.aborted ? " (aborted)" : "");
  std::fflush(stdout);
  return t;
}

// --------------------------------------------------------------- criteria

Outcome quadrature_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0), C(0.0, 1.0);
  const QuadratureRule rule = gauss_legendre(10);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int degree = trial % 20;
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (auto& v : c) v = C(rng);
    const Vec2 a(3 * U(rng), 3 * U(rng));
    const Vec2 b = a + Vec2(U(rng), U(rng)).normalized() * (0.01 + 2 * C(rng));
    const Segment seg{LinePiece{a, b}, 0, {}};
    double exact = 0.0;
    for (std::size_t k = 0; k < c.size(); k += 2) exact += 2.0 * c[k] / static_cast<double>(k + 1);
    exact *= 0.5 * (b - a).norm();
    const double got = integrate_regular(seg, rule, [&](const SegmentPoint& q) {
      const double xi = 2.0 * (q.x - a).dot(b - a) / (b - a).squaredNorm() - 1.0;
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) s = s * xi + c[k];
      return s;
    });
    worst = std::max(worst, rel(got, exact));
  }
  const double t = seconds_since(t0);
  return {worst < 1e-12 && t < 1.0, fmt("1000 polynomials, max rel err %.2e (< 1e-12), %.3f s (< 1 s)", worst, t)};
}

Outcome singular_regularization() {
  const QuadratureRule g = gauss_legendre(10);
  std::vector<std::pair<std::string, std::function<double(double)>>> fs = {
      {"cos t", [](double t) { return std::cos(t); }}, {"e^t", [](double t) { return std::exp(t); }}};
  for (std::uint64_t seed : {3u, 4u}) {
    const NetworkParams p = init_xavier(Architecture{2, 20, 2, 1}, seed);
    const Vec2 x0(0.3, -0.2), d(0.5, 0.4);
    fs.emplace_back("tanh net " + std::to_string(seed), [p, x0, d](double t) { return forward(p, x0 + t * d)[0]; });
  }
  double weak = 0.0, cauchy = 0.0;
  std::string worst_weak;
  for (const auto& [name, f] : fs) {
    const double wl = integrate_weak_log(g, 1.0, f, f(0.0));
    const double wl_ref = adaptive_integral([&](double t) { return std::log(std::abs(t)) * f(t); }, -1.0, 1.0,
                                            Singularity::Log, 0.0);
    const double cp = integrate_cauchy(g, f);
    const double cp_ref = adaptive_integral([&](double t) { return f(t) / t; }, -1.0, 1.0, Singularity::Cauchy, 0.0);
    if (rel(wl, wl_ref) > weak) {
      weak = rel(wl, wl_ref);
      worst_weak = name;
    }
    cauchy = std::max(cauchy, rel(cp, cp_ref));
  }
  const double one_w = std::abs(integrate_weak_log(g, 1.0, [](double) { return 1.0; }, 1.0) + 2.0);
  const double one_c = std::abs(integrate_cauchy(g, [](double) { return 1.0; }));
  const bool pass = weak < 1e-8 && cauchy < 1e-8 && one_w < 1e-12 && one_c < 1e-12;
  return {pass, fmt("n_g = 10: weak-log max rel err %.2e (%s) (< 1e-8), Cauchy %.2e (< 1e-8); f = 1: %.1e, %.1e",
                    weak, worst_weak.c_str(), cauchy, one_w, one_c)};
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

SpatialOutput unit_first(const Vec2&, int outputs) {
  SpatialOutput o;
  o.value = Eigen::VectorXd::Zero(outputs);
  o.value(0) = 1.0;
  o.jacobian = Eigen::MatrixXd::Zero(outputs, 2);
  return o;
}

Outcome free_terms() {
  const auto one = BoundaryCondition::dirichlet(ScalarField([](const Vec2&) { return 1.0; }));
  double pot = 0.0;
  for (const Boundary& b : {make_flower().potential.boundary, circle({0.5, -0.2}, 1.3, 32, one), square(one)}) {
    PotentialProblem p;
    p.boundary = b;
    for (auto& s : p.boundary.segments) s.bc = one;
    pot = std::max(pot, residuals(p, [](const Vec2& x) { return unit_first(x, 1); }).cwiseAbs().maxCoeff());
  }
  const Material mat = Material::make(1.0, 0.3, PlaneCondition::PlaneStrain);
  double el = 0.0;
  for (const auto& bc : {BoundaryCondition::dirichlet(VectorField([](const Vec2&) { return Vec2(1.0, 0.0); })),
                         BoundaryCondition::neumann(VectorField([](const Vec2&) { return Vec2::Zero(); }))}) {
    for (const Boundary& b : {square(bc), circle({1.0, 1.0}, 0.8, 32, bc)}) {
      el = std::max(el, residuals(single_region(b, mat), [](const Vec2& x) { return unit_first(x, 2); })
                            .cwiseAbs()
                            .maxCoeff());
    }
  }
  return {pot < 1e-6 && el < 1e-5,
          fmt("constant potential max residual %.2e (< 1e-6), rigid translation %.2e (< 1e-5)", pot, el)};
}

Outcome plug_in() {
  std::ostringstream os;
  bool pass = true;
  const auto check = [&](const char* name, double r10, double r20, double limit) {
    const bool ok = r10 < limit && r20 < r10;
    pass = pass && ok;
    os << fmt("%s %.2e -> %.2e%s; ", name, r10, r20, ok ? "" : " (!)");
  };
  check("flower", residuals(make_flower(10).potential, flower_solution).cwiseAbs().maxCoeff(),
        residuals(make_flower(20).potential, flower_solution).cwiseAbs().maxCoeff(), 1e-3);
  check("flow", residuals(make_cylinder_flow(10).potential, flow_perturbation).cwiseAbs().maxCoeff(),
        residuals(make_cylinder_flow(20).potential, flow_perturbation).cwiseAbs().maxCoeff(), 1e-3);
  check("beam", residuals(make_beam(10).elastic, beam_solution).cwiseAbs().maxCoeff(),
        residuals(make_beam(20).elastic, beam_solution).cwiseAbs().maxCoeff(), 5e-3);
  const Benchmark h10 = make_hertz(10), h20 = make_hertz(20);
  check("hertz", residuals(h10.elastic, h10.reference.field).cwiseAbs().maxCoeff(),
        residuals(h20.elastic, h20.reference.field).cwiseAbs().maxCoeff(), 5e-3);
  os << "(limits 1e-3 potential, 5e-3 elastic at n_g = 10; n_g = 20 must be lower; inclusion has no closed form)";
  return {pass, os.str()};
}

Outcome autodiff() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::uniform_int_distribution<int> W(3, 20), B(0, 3), O(1, 2);
  double spatial = 0.0;
  for (int k = 0; k < 50; ++k) {
    const NetworkParams p = init_xavier(Architecture{2, W(rng), B(rng), O(rng)}, 1000 + k);
    const Vec2 x(U(rng), U(rng));
    const SpatialOutput s = forward_with_spatial_grad(p, x);
    Eigen::MatrixXd fd(s.jacobian.rows(), 2);
    const double h = 1e-5;
    for (int c = 0; c < 2; ++c) {
      Vec2 e = Vec2::Zero();
      e[c] = h;
      fd.col(c) = (forward(p, x + e) - forward(p, x - e)) / (2 * h);
    }
    spatial = std::max(spatial, (fd - s.jacobian).norm() / s.jacobian.norm());
  }

  std::vector<Benchmark> benches = {make_flower(), make_cylinder_flow(), make_beam(), make_hertz()};
  std::vector<ResidualOperator> ops;
  for (const auto& b : benches) ops.push_back(assemble(b.model()));
  double param = 0.0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t which = static_cast<std::size_t>(k) % ops.size();
    const NetworkParams p = init_xavier(benches[which].architecture(W(rng), B(rng)), 5000 + k);
    Eigen::VectorXd g;
    loss_and_gradient(ops[which], p, &g);
    Eigen::VectorXd r(p.theta.size());
    for (auto& v : r) v = U(rng);
    const Eigen::VectorXd d = (g.normalized() + r.normalized()).normalized();
    const double h = 1e-6;
    NetworkParams a = p, c = p;
    a.theta += h * d;
    c.theta -= h * d;
    const double fd = (loss_and_gradient(ops[which], a, nullptr) - loss_and_gradient(ops[which], c, nullptr)) / (2 * h);
    param = std::max(param, rel(fd, g.dot(d)));
  }
  return {spatial < 1e-6 && param < 1e-5,
          fmt("50 configurations each: spatial Jacobian max rel err %.2e (< 1e-6), parameter gradient %.2e (< 1e-5)",
              spatial, param)};
}

Outcome flower_end_to_end(const Trained& t, const Evaluation& ev) {
  const double b = ev.boundary.rel_l2, i = ev.interior.rel_l2;
  const bool pass = !t.aborted && b < 0.02 && i <= b && t.seconds < 1800.0;
  return {pass, fmt("flux rel L2 %.3f%% (< 2%%), interior rel L2 %.3f%% (<= flux), %zu source points, %.0f s (< 1800 s)",
                    100 * b, 100 * i, t.bench.potential.boundary.size(), t.seconds)};
}

Outcome flow_end_to_end(const Trained& t) {
  const Evaluation ev = evaluate(t.bench, t.params);
  const Eigen::MatrixXd u = interior_direct(
      t.bench.model(), 0, {Vec2(3.0, 0.0)},
      [&](const EvalPoints& pts) { return network_channels(t.params, pts); });
  const double at3 = u(0, 0);
  const bool pass = !t.aborted && ev.interior.rel_l2 < 0.02 && rel(at3, 2.25) < 0.02;
  return {pass, fmt("perturbation rel L2 %.3f%% on %zu grid points (< 2%%), u(3,0) = %.4f (2.25 +- 2%%)",
                    100 * ev.interior.rel_l2, t.bench.reference.grid.size(), at3)};
}

Outcome beam_end_to_end(const Trained& t) {
  const Evaluation ev = evaluate(t.bench, t.params);
  const bool pass = !t.aborted && ev.boundary.rel_l2 < 0.03 && ev.interior.rel_l2 < 0.03;
  return {pass, fmt("boundary unknown rel L2 %.3f%% (< 3%%), interior displacement rel L2 %.3f%% (< 3%%)",
                    100 * ev.boundary.rel_l2, 100 * ev.interior.rel_l2)};
}

Outcome hertz_end_to_end(const Trained& t) {
  const Evaluation ev = evaluate(t.bench, t.params);
  const bool pass = !t.aborted && ev.boundary.rel_l2 < 0.03;
  return {pass, fmt("patch displacement rel L2 %.3f%% over %zu samples (< 3%%); interior rel L2 %.1e (reported)",
                    100 * ev.boundary.rel_l2, ev.s.size(), ev.interior.rel_l2)};
}

Outcome inclusion_end_to_end(const Trained& t) {
  const Evaluation ev = evaluate(t.bench, t.params);
  const ErrorMetrics u = error_metrics(Eigen::MatrixXd(ev.boundary_pred.topRows(2)),
                                       Eigen::MatrixXd(ev.boundary_ref.topRows(2)));
  const ErrorMetrics tr = error_metrics(Eigen::MatrixXd(ev.boundary_pred.bottomRows(2)),
                                        Eigen::MatrixXd(ev.boundary_ref.bottomRows(2)));
  const bool pass = !t.aborted && u.rel_l2 < 0.05 && tr.rel_l2 < 0.05;
  return {pass, fmt("interface displacement rel L2 %.3f%%, traction %.3f%% (< 5%%) vs 512-element oracle; "
                    "matrix interior rel L2 %.3f%% (reported); one displacement field on both sides",
                    100 * u.rel_l2, 100 * tr.rel_l2, 100 * ev.interior.rel_l2)};
}

// Points 0.03 to 0.1 inside the flower boundary.
std::vector<Vec2> near_band(const Boundary& bd) {
  std::vector<Vec2> out;
  for (const auto& seg : bd.segments) {
    for (const double xi : {-0.5, 0.0, 0.5}) {
      const SegmentPoint p = seg.at(xi);
      for (const double d : {0.04, 0.06, 0.08}) {
        const Vec2 y = p.x - d * p.normal;
        const double dist = bd.distance_to(y);
        if (dist >= 0.03 && dist <= 0.1 && winding_number(bd, y) != 0) out.push_back(y);
      }
    }
  }
  return out;
}

// The evaluation error is isolated by feeding the exact boundary data through
// the representation formula. With the trained network the band error is
// dominated by the network's own flux error, which refinement cannot touch,
// so those medians are reported alongside.
Outcome refinement(const Trained& t) {
  const std::vector<Vec2> ys = near_band(t.bench.potential.boundary);
  const BieModel model = t.bench.model();
  const auto band_median = [&](const ChannelSource& src, int r) {
    const Eigen::MatrixXd u = interior_direct(model, 0, ys, src, r);
    std::vector<double> err;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      err.push_back(std::abs(u(0, static_cast<Eigen::Index>(j)) - flower_solution(ys[j]).value(0)));
    }
    return median(err);
  };
  const ChannelSource exact = [](const EvalPoints& pts) { return channels_from_field(pts, flower_solution, 1); };
  const ChannelSource net = [&](const EvalPoints& pts) { return network_channels(t.params, pts); };
  double e[3], n[3];
  int k = 0;
  for (const int r : {1, 2, 4}) {
    e[k] = band_median(exact, r);
    n[k++] = band_median(net, r);
  }
  const bool pass = e[1] < e[0] && e[2] < e[1];
  return {pass, fmt("median abs error on %zu band points with exact boundary data: %.2e (1x), %.2e (2x), "
                    "%.2e (4x), strictly decreasing; trained network: %.6e, %.6e, %.6e",
                    ys.size(), e[0], e[1], e[2], n[0], n[1], n[2])};
}

Outcome non_imposition(const Trained& t, const Evaluation& ev) {
  double gap = 0.0;
  for (const auto& smp : t.bench.reference.path) {
    const Segment& seg = t.bench.potential.boundary.segments[smp.segment];
    const Vec2 x = seg.point(smp.xi);
    gap = std::max(gap, std::abs(forward(t.params, x)[0] - seg.bc.scalar(x)));
  }
  const bool pass = gap > 10.0 * ev.boundary.rel_l2;
  return {pass, fmt("max |phi - u_bar| on the boundary %.3e vs 10 x flux rel L2 = %.3e", gap,
                    10.0 * ev.boundary.rel_l2)};
}

Outcome flower_oracle_crosscheck(const Trained& t) {
  PotentialProblem fine = t.bench.potential;
  fine.boundary = fine.boundary.refined(2);
  const BieModel m = fine.model();
  const BemSolution s = bem_solve(m);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m.boundary.size(); ++i) {
    const SegmentPoint c = m.boundary.segments[i].at(0.0);
    const double q = forward_with_spatial_grad(t.params, c.x).jacobian.row(0).dot(c.normal);
    num += std::pow(q - s.t[i].x(), 2);
    den += std::pow(s.t[i].x(), 2);
  }
  const double e = std::sqrt(num / den);
  return {e < 0.03, fmt("trained flux vs %zu-element BEM: rel L2 %.3f%% (< 3%%), oracle rcond %.1e",
                        m.boundary.size(), 100 * e, s.rcond)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> want(only.begin(), only.end());
  const auto wanted = [&](int c) { return want.empty() || want.count(c) > 0; };

  int failed = 0, run = 0;
  const auto report = [&](const std::string& label, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ++run;
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", label.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };

  if (wanted(1)) report("[1] quadrature exactness", quadrature_exactness);
  if (wanted(2)) report("[2] singular regularization", singular_regularization);
  if (wanted(3)) report("[3] free-term identities", free_terms);
  if (wanted(4)) report("[4] analytic plug-in residuals", plug_in);
  if (wanted(5)) report("[5] autodiff finite-difference checks", autodiff);

  if (wanted(6) || wanted(11) || wanted(12)) {
    const Trained flower = train_benchmark(make_flower());
    const Evaluation ev = evaluate(flower.bench, flower.params);
    if (wanted(6)) {
      report("[6] flower end-to-end", [&] { return flower_end_to_end(flower, ev); });
      report("[6] flower oracle cross-check", [&] { return flower_oracle_crosscheck(flower); });
    }
    if (wanted(11)) report("[11] interior refinement near the boundary", [&] { return refinement(flower); });
    if (wanted(12)) report("[12] Dirichlet data not imposed on the network", [&] { return non_imposition(flower, ev); });
  }
  if (wanted(7)) report("[7] cylinder flow end-to-end", [] { return flow_end_to_end(train_benchmark(make_cylinder_flow())); });
  if (wanted(8)) report("[8] cantilever beam end-to-end", [] { return beam_end_to_end(train_benchmark(make_beam())); });
  if (wanted(9)) report("[9] Hertz contact end-to-end", [] { return hertz_end_to_end(train_benchmark(make_hertz())); });
  if (wanted(10)) {
    report("[10] stiff inclusion end-to-end", [] { return inclusion_end_to_end(train_benchmark(make_inclusion())); });
  }

  std::printf("%d of %d checks passed\n", run - failed, run);
  return failed == 0 ? 0 : 1;
}
