#pragma once

// Minimal automatic differentiation: a reverse-mode tape over scalars and a
// forward-mode dual carrying the two spatial tangents. Dual2<Var> nests the
// forward mode inside the tape, which is how parameter gradients of losses
// built from network values and spatial derivatives are obtained.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace binn::ad {

class Tape;

class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  double value() const;
  std::size_t index() const { return index_; }
  Tape* tape() const { return tape_; }

 private:
  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

class Tape {
 public:
  Var variable(double value);
  // Constants are recorded as leaves so mixed arithmetic stays on one tape.
  Var constant(double value) { return push(value, kNone, 0.0, kNone, 0.0, "const"); }

  Var push(double value, std::size_t a, double da, std::size_t b, double db, const char* op);

  double value(std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Adjoints of every recorded node with respect to `output`.
  std::vector<double> adjoints(const Var& output) const;

  // Throws naming the first non-finite node, if any.
  void check_finite() const;

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  struct Node {
    std::size_t a;
    std::size_t b;
    double da;
    double db;
    const char* op;
  };
  std::vector<Node> nodes_;
  std::vector<double> values_;
};

inline double Var::value() const { return tape_->value(index_); }

inline Var Tape::variable(double value) { return push(value, kNone, 0.0, kNone, 0.0, "var"); }

inline Var Tape::push(double value, std::size_t a, double da, std::size_t b, double db,
                      const char* op) {
  nodes_.push_back({a, b, da, db, op});
  values_.push_back(value);
  return Var(this, values_.size() - 1);
}

inline std::vector<double> Tape::adjoints(const Var& output) const {
  std::vector<double> adj(values_.size(), 0.0);
  adj[output.index()] = 1.0;
  for (std::size_t i = output.index() + 1; i-- > 0;) {
    const double g = adj[i];
    if (g == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.a != kNone) adj[n.a] += g * n.da;
    if (n.b != kNone) adj[n.b] += g * n.db;
  }
  return adj;
}

inline void Tape::check_finite() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::runtime_error("non-finite intermediate at tape node " + std::to_string(i) +
                               " (op '" + nodes_[i].op + "')");
    }
  }
}

inline Var operator+(const Var& x, const Var& y) {
  return x.tape()->push(x.value() + y.value(), x.index(), 1.0, y.index(), 1.0, "add");
}
inline Var operator-(const Var& x, const Var& y) {
  return x.tape()->push(x.value() - y.value(), x.index(), 1.0, y.index(), -1.0, "sub");
}
inline Var operator*(const Var& x, const Var& y) {
  return x.tape()->push(x.value() * y.value(), x.index(), y.value(), y.index(), x.value(),
                        "mul");
}
inline Var operator/(const Var& x, const Var& y) {
  const double inv = 1.0 / y.value();
  return x.tape()->push(x.value() * inv, x.index(), inv, y.index(),
                        -x.value() * inv * inv, "div");
}
inline Var operator-(const Var& x) {
  return x.tape()->push(-x.value(), x.index(), -1.0, Tape::kNone, 0.0, "neg");
}
inline Var operator+(const Var& x, double c) {
  return x.tape()->push(x.value() + c, x.index(), 1.0, Tape::kNone, 0.0, "addc");
}
inline Var operator+(double c, const Var& x) { return x + c; }
inline Var operator-(const Var& x, double c) { return x + (-c); }
inline Var operator-(double c, const Var& x) {
  return x.tape()->push(c - x.value(), x.index(), -1.0, Tape::kNone, 0.0, "rsubc");
}
inline Var operator*(const Var& x, double c) {
  return x.tape()->push(x.value() * c, x.index(), c, Tape::kNone, 0.0, "mulc");
}
inline Var operator*(double c, const Var& x) { return x * c; }
inline Var tanh(const Var& x) {
  const double t = std::tanh(x.value());
  return x.tape()->push(t, x.index(), 1.0 - t * t, Tape::kNone, 0.0, "tanh");
}
inline Var square(const Var& x) {
  return x.tape()->push(x.value() * x.value(), x.index(), 2.0 * x.value(), Tape::kNone, 0.0,
                        "square");
}
inline Var& operator+=(Var& x, const Var& y) { return x = x + y; }

inline double square(double x) { return x * x; }

// Value plus tangents along x₁ and x₂.
template <class T>
struct Dual2 {
  T v;
  T d1;
  T d2;
};

template <class T>
Dual2<T> operator+(const Dual2<T>& a, const Dual2<T>& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}
template <class T>
Dual2<T> operator-(const Dual2<T>& a, const Dual2<T>& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}
template <class T>
Dual2<T> operator*(const Dual2<T>& a, const Dual2<T>& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + a.v * b.d2};
}
// Scaling by a tangent-free quantity (a weight or a constant).
template <class T, class S>
Dual2<T> operator*(const S& w, const Dual2<T>& a) {
  return {w * a.v, w * a.d1, w * a.d2};
}
template <class T, class S>
Dual2<T> operator+(const Dual2<T>& a, const S& c) {
  return {a.v + c, a.d1, a.d2};
}
template <class T, class S>
Dual2<T> operator*(const Dual2<T>& a, const S& w) {
  return {a.v * w, a.d1 * w, a.d2 * w};
}
template <class T, class S>
Dual2<T> operator+(const S& c, const Dual2<T>& a) {
  return {c + a.v, a.d1, a.d2};
}
template <class T, class S>
Dual2<T> operator-(const Dual2<T>& a, const S& c) {
  return {a.v - c, a.d1, a.d2};
}
template <class T, class S>
Dual2<T> operator-(const S& c, const Dual2<T>& a) {
  return {c - a.v, -a.d1, -a.d2};
}
template <class T>
Dual2<T> operator-(const Dual2<T>& a) {
  return {-a.v, -a.d1, -a.d2};
}
template <class T>
Dual2<T> operator/(const Dual2<T>& a, const Dual2<T>& b) {
  const T inv = 1.0 / b.v;
  const T q = a.v * inv;
  return {q, (a.d1 - q * b.d1) * inv, (a.d2 - q * b.d2) * inv};
}
template <class T>
Dual2<T> log(const Dual2<T>& a) {
  using std::log;
  const T inv = 1.0 / a.v;
  return {log(a.v), a.d1 * inv, a.d2 * inv};
}
// atan2(y, x) with tangents (x dy − y dx)/(x² + y²).
template <class T>
Dual2<T> atan2(const Dual2<T>& y, const Dual2<T>& x) {
  using std::atan2;
  const T inv = 1.0 / (x.v * x.v + y.v * y.v);
  return {atan2(y.v, x.v), (x.v * y.d1 - y.v * x.d1) * inv, (x.v * y.d2 - y.v * x.d2) * inv};
}
template <class T>
Dual2<T> tanh(const Dual2<T>& a) {
  using std::tanh;
  const T t = tanh(a.v);
  const T slope = 1.0 - t * t;
  return {t, slope * a.d1, slope * a.d2};
}

}  // namespace binn::ad
