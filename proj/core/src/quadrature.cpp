#include "binn/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

namespace binn {

namespace {

std::atomic<double> g_log_constant_scale{1.0};

void require_even(const QuadratureRule& rule) {
  if (!rule.even()) {
    throw QuadratureError("singular segments require an even Gauss order (got n_g = " +
                          std::to_string(rule.order()) + "); xi = 0 must not be a node");
  }
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1 || n > 64) {
    throw QuadratureError("Gauss-Legendre order must be in [1, 64], got " + std::to_string(n));
  }
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

double integrate_regular(const Segment& seg, const QuadratureRule& rule,
                         const std::function<double(const SegmentPoint&)>& f) {
  double sum = 0.0;
  for (int i = 0; i < rule.order(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const SegmentPoint sp = seg.at(rule.nodes[k]);
    const double v = f(sp);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite integrand at node " << i << " (xi = " << rule.nodes[k] << ", x = ("
         << sp.x.x() << ", " << sp.x.y() << "))";
      throw QuadratureError(os.str());
    }
    sum += v * sp.jacobian * rule.weights[k];
  }
  return sum;
}

WeakLogWeights weak_log_weights(const QuadratureRule& rule, double a) {
  require_even(rule);
  if (!(a > 0.0)) throw QuadratureError("weak-log half-length must be positive");
  WeakLogWeights out;
  out.node.resize(rule.nodes.size());
  double subtracted = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = a * rule.nodes[i];
    const double w = a * rule.weights[i] * std::log(std::abs(t));
    out.node[i] = w;
    subtracted += w;
  }
  out.center = -subtracted + g_log_constant_scale.load() * 2.0 * (a * std::log(a) - a);
  return out;
}

double integrate_weak_log(const QuadratureRule& rule, double a,
                          const std::function<double(double)>& f, double f0) {
  const WeakLogWeights w = weak_log_weights(rule, a);
  double sum = w.center * f0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(a * rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw QuadratureError("non-finite weak-log factor at node " + std::to_string(i));
    }
    sum += w.node[i] * v;
  }
  return sum;
}

std::vector<double> cauchy_weights(const QuadratureRule& rule) {
  require_even(rule);
  std::vector<double> out(rule.nodes.size());
  // Positive node ξ_i pairs with its mirror −ξ_i: w_i/ξ_i on f(ξ_i) and
  // −w_i/ξ_i on f(−ξ_i), which is w_j/ξ_j for the mirror node.
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    out[i] = rule.weights[i] / rule.nodes[i];
  }
  return out;
}

double integrate_cauchy(const QuadratureRule& rule, const std::function<double(double)>& f) {
  require_even(rule);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double xi = rule.nodes[i];
    if (xi <= 0.0) continue;
    const double fp = f(xi);
    const double fm = f(-xi);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw QuadratureError("non-finite Cauchy factor at node " + std::to_string(i));
    }
    sum += rule.weights[i] * (fp - fm) / xi;
  }
  return sum;
}

namespace testing {
void set_log_constant_scale(double scale) { g_log_constant_scale.store(scale); }
double log_constant_scale() { return g_log_constant_scale.load(); }
}  // namespace testing

}  // namespace binn
