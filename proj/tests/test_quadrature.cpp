#include "doctest.h"

#include "binn/oracle.hpp"
#include "binn/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

using namespace binn;

TEST_CASE("Gauss-Legendre rules") {
  const auto r1 = gauss_legendre(1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));
  const auto r2 = gauss_legendre(2);
  CHECK(std::abs(r2.nodes[1] - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(r2.nodes[0] + 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(r2.weights[0] - 1.0) < 1e-15);
  for (int n = 1; n <= 64; ++n) {
    const auto r = gauss_legendre(n);
    const double sum = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    CHECK(std::abs(sum - 2.0) < 1e-14);
    for (int i = 0; i < n; ++i) {
      CHECK(r.nodes[static_cast<std::size_t>(i)] == -r.nodes[static_cast<std::size_t>(n - 1 - i)]);
      CHECK(r.weights[static_cast<std::size_t>(i)] > 0.0);
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), QuadratureError);
  CHECK_THROWS_AS(gauss_legendre(65), QuadratureError);
}

TEST_CASE("order 10 integrates xi^18 exactly") {
  const auto r = gauss_legendre(10);
  double s = 0.0;
  for (int i = 0; i < 10; ++i) s += r.weights[static_cast<std::size_t>(i)] * std::pow(r.nodes[static_cast<std::size_t>(i)], 18);
  CHECK(std::abs(s - 2.0 / 19.0) / (2.0 / 19.0) < 1e-13);
}

TEST_CASE("regular integration on segments") {
  const Segment s{LinePiece{{0.0, 0.0}, {2.0, 0.0}}, 0, {}};
  const auto r = gauss_legendre(10);
  CHECK(std::abs(integrate_regular(s, r, [](const SegmentPoint&) { return 1.0; }) - 2.0) < 1e-14);
  const Segment u{LinePiece{{-1.0, 0.0}, {1.0, 0.0}}, 0, {}};
  CHECK(std::abs(integrate_regular(u, r, [](const SegmentPoint& p) { return p.x.x() * p.x.x(); }) -
                 2.0 / 3.0) < 1e-14);
  CHECK_THROWS_AS(integrate_regular(u, r, [](const SegmentPoint&) {
                    return std::numeric_limits<double>::quiet_NaN();
                  }),
                  QuadratureError);
}

TEST_CASE("regular integration of the Laplace kernel matches the adaptive oracle") {
  const Segment s{LinePiece{{0.0, 0.0}, {1.0, 0.5}}, 0, {}};
  const Vec2 y(0.4, 2.0);
  const auto f = [&](const Vec2& x) { return -std::log((x - y).norm()) / (2.0 * std::numbers::pi); };
  const double q = integrate_regular(s, gauss_legendre(10), [&](const SegmentPoint& p) { return f(p.x); });
  const double ref = adaptive_integral(
      [&](double xi) { const auto p = s.at(xi); return f(p.x) * p.jacobian; }, -1.0, 1.0);
  CHECK(std::abs(q - ref) / std::abs(ref) < 1e-10);
}

TEST_CASE("random polynomials up to degree 2n-1 are exact on straight segments") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int n : {2, 5, 10, 16}) {
    const auto r = gauss_legendre(n);
    for (int trial = 0; trial < 20; ++trial) {
      const Segment s{LinePiece{{U(rng), U(rng)}, {U(rng) + 2.0, U(rng)}}, 0, {}};
      std::vector<double> c(static_cast<std::size_t>(2 * n));
      for (auto& v : c) v = U(rng);
      // Polynomial in the arc coordinate t ∈ [0, L].
      const double L = s.length();
      auto poly = [&](double t) {
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
        return v;
      };
      double exact = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) exact += c[k] * std::pow(L, k + 1) / static_cast<double>(k + 1);
      const double q = integrate_regular(s, r, [&](const SegmentPoint& p) { return poly((p.x - s.start()).norm()); });
      CHECK(std::abs(q - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("weak log: closed-form cases") {
  const auto r = gauss_legendre(10);
  CHECK(std::abs(integrate_weak_log(r, 1.0, [](double) { return 1.0; }, 1.0) + 2.0) < 1e-12);
  CHECK(std::abs(integrate_weak_log(r, 1.0, [](double t) { return t; }, 0.0)) < 1e-14);
  const double a = 0.3;
  CHECK(std::abs(integrate_weak_log(r, a, [](double) { return 1.0; }, 1.0) -
                 2.0 * (a * std::log(a) - a)) < 1e-14);
  CHECK_THROWS_AS(integrate_weak_log(gauss_legendre(9), 1.0, [](double) { return 1.0; }, 1.0),
                  QuadratureError);
}

TEST_CASE("weak log: error shrinks as the order grows") {
  const double si1 = 0.94608307036718301494;
  const double exact = -2.0 * si1;
  double prev = 1.0;
  for (int n : {4, 8, 16, 32, 64}) {
    const double q = integrate_weak_log(gauss_legendre(n), 1.0, [](double t) { return std::cos(t); }, 1.0);
    const double err = std::abs(q - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("weak log weights reproduce integrate_weak_log") {
  const auto r = gauss_legendre(10);
  const double a = 0.7;
  const auto w = weak_log_weights(r, a);
  auto f = [](double t) { return std::exp(t) + t * t; };
  double s = w.center * f(0.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += w.node[i] * f(a * r.nodes[i]);
  CHECK(s == doctest::Approx(integrate_weak_log(r, a, f, f(0.0))).epsilon(1e-15));
}

TEST_CASE("Cauchy principal value") {
  const auto r = gauss_legendre(10);
  CHECK(std::abs(integrate_cauchy(r, [](double) { return 1.0; })) < 1e-15);
  CHECK(std::abs(integrate_cauchy(r, [](double x) { return x; }) - 2.0) < 1e-14);
  // 2 ∫_0^1 sinh(x)/x dx = 2 Shi(1)
  const double shi1 = 1.05725087537572851457;
  const double q = integrate_cauchy(r, [](double x) { return std::exp(x); });
  CHECK(std::abs(q - 2.0 * shi1) / (2.0 * shi1) < 1e-8);
  const double o = adaptive_integral([](double x) { return std::exp(x) / x; }, -1.0, 1.0,
                                     Singularity::Cauchy, 0.0);
  CHECK(std::abs(q - o) / std::abs(o) < 1e-8);
  CHECK_THROWS_AS(integrate_cauchy(gauss_legendre(7), [](double) { return 1.0; }), QuadratureError);
}

TEST_CASE("Cauchy rule is antisymmetric under reflection") {
  const auto r = gauss_legendre(12);
  auto f = [](double x) { return std::sin(3.0 * x) + std::cosh(x) * x * x + 0.3; };
  const double a = integrate_cauchy(r, f);
  const double b = integrate_cauchy(r, [&](double x) { return f(-x); });
  CHECK(std::abs(a + b) < 1e-12);
  const auto w = cauchy_weights(r);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += w[i] * f(r.nodes[i]);
  CHECK(std::abs(s - a) < 1e-13);
}

TEST_CASE("log constant scale hook") {
  const auto r = gauss_legendre(10);
  testing::set_log_constant_scale(1.5);
  const double v = integrate_weak_log(r, 1.0, [](double) { return 1.0; }, 1.0);
  testing::set_log_constant_scale(1.0);
  CHECK(std::abs(v + 3.0) < 1e-12);
  CHECK(testing::log_constant_scale() == 1.0);
}
