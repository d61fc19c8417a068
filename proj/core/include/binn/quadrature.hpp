#pragma once

#include "binn/geometry.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace binn {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gauss–Legendre rule on [-1, 1]. Nodes are ascending and symmetric about 0.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int order() const { return static_cast<int>(nodes.size()); }
  bool even() const { return nodes.size() % 2 == 0; }
};

QuadratureRule gauss_legendre(int n);

// Σ f(x(ξ_i)) J(ξ_i) w_i over the segment.
double integrate_regular(const Segment& seg, const QuadratureRule& rule,
                         const std::function<double(const SegmentPoint&)>& f);

// ∫_{-a}^{a} ln|t| f(t) dt ≈ Σ node[i]·f(a ξ_i) + center·f(0).
// Subtraction–addition: the Gauss sum runs over ln|t|[f(t) − f(0)] and the
// subtracted part is added back as 2 f(0)(a ln a − a).
struct WeakLogWeights {
  std::vector<double> node;
  double center = 0.0;
};
WeakLogWeights weak_log_weights(const QuadratureRule& rule, double a);

double integrate_weak_log(const QuadratureRule& rule, double a,
                          const std::function<double(double)>& f, double f0);

// PV ∫_{-1}^{1} f(ξ)/ξ dξ ≈ Σ_{ξ_i>0} w_i [f(ξ_i) − f(−ξ_i)] / ξ_i, expressed
// as one weight per node of the full rule.
std::vector<double> cauchy_weights(const QuadratureRule& rule);

double integrate_cauchy(const QuadratureRule& rule, const std::function<double(double)>& f);

namespace testing {
// Scales the analytic 2 f(0)(a ln a − a) term. Used only by the verify
// suite's mutation check; 1.0 restores normal behavior.
void set_log_constant_scale(double scale);
double log_constant_scale();
}  // namespace testing

}  // namespace binn
