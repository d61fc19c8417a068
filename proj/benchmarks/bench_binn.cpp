#include "binn/benchmarks.hpp"
#include "binn/oracle.hpp"
#include "binn/training.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace binn;

static void BM_GaussLegendre(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre(n));
}
BENCHMARK(BM_GaussLegendre)->Arg(10)->Arg(64);

static void BM_WeakLog(benchmark::State& state) {
  const QuadratureRule g = gauss_legendre(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_weak_log(g, 0.7, [](double t) { return std::cos(t); }, 1.0));
  }
}
BENCHMARK(BM_WeakLog)->Arg(10)->Arg(20);

static void BM_KelvinKernel(benchmark::State& state) {
  const Material mat = Material::make(1.0, 0.3, PlaneCondition::PlaneStrain);
  const Vec2 x(0.3, 0.4), y(-0.2, 0.1), n(0.6, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(kelvin_kernel(x, y, n, mat));
}
BENCHMARK(BM_KelvinKernel);

static void BM_HalfPlaneKernel(benchmark::State& state) {
  const Material mat = Material::make(1.0, 0.3, PlaneCondition::PlaneStrain);
  const Vec2 x(0.3, 0.4), y(0.5, 0.1), n(0.6, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(halfplane_kernel(x, y, n, mat));
}
BENCHMARK(BM_HalfPlaneKernel);

static void BM_ForwardBatch(benchmark::State& state) {
  const NetworkParams p = init_xavier(Architecture{2, 20, 2, 1}, 1);
  const Eigen::Matrix2Xd pts = Eigen::Matrix2Xd::Random(2, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(p, pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(100)->Arg(1100);

static void BM_Assemble(benchmark::State& state) {
  const BieModel m = make_flower().model();
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m));
}
BENCHMARK(BM_Assemble)->Unit(benchmark::kMillisecond);

// One training step's worth of work: loss and full parameter gradient.
static void BM_LossGradient(benchmark::State& state) {
  const Benchmark b = state.range(0) == 0 ? make_flower() : make_beam();
  const ResidualOperator op = assemble(b.model());
  const NetworkParams p = init_xavier(b.architecture(), 1);
  Eigen::VectorXd g;
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(op, p, &g));
  state.SetLabel(b.name);
}
BENCHMARK(BM_LossGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_BemSolveFlower(benchmark::State& state) {
  PotentialProblem p = make_flower().potential;
  p.boundary = p.boundary.refined(2);
  const BieModel m = p.model();
  for (auto _ : state) benchmark::DoNotOptimize(bem_solve(m));
}
BENCHMARK(BM_BemSolveFlower)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
