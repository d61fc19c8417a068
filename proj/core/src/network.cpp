#include "binn/network.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace binn {

namespace {

constexpr const char* kCheckpointTag = "binn-checkpoint v1";

using Matrix = Eigen::MatrixXd;

Eigen::Map<const Matrix> weight(const NetworkParams& p, const LayerShape& s) {
  return {p.theta.data() + s.weight_offset(), s.rows, s.cols};
}
Eigen::Map<const Eigen::VectorXd> bias(const NetworkParams& p, const LayerShape& s) {
  return {p.theta.data() + s.bias_offset(), s.rows};
}

// tanh layer on a batch with two tangent channels.
BatchCache::TanhLayer tanh_layer(const NetworkParams& p, const LayerShape& s, const Matrix& in,
                                 const Matrix& in1, const Matrix& in2) {
  const auto w = weight(p, s);
  BatchCache::TanhLayer l;
  l.in = in;
  l.in1 = in1;
  l.in2 = in2;
  l.s = ((w * in).colwise() + bias(p, s)).array().tanh().matrix();
  l.z1 = w * in1;
  l.z2 = w * in2;
  return l;
}

struct LayerOut {
  Matrix v, d1, d2;
};

LayerOut layer_output(const BatchCache::TanhLayer& l) {
  const Matrix slope = (1.0 - l.s.array().square()).matrix();
  return {l.s, slope.cwiseProduct(l.z1), slope.cwiseProduct(l.z2)};
}

// Adjoint of one tanh layer: consumes output adjoints, accumulates into grad
// and returns input adjoints.
LayerOut tanh_backward(const NetworkParams& p, const LayerShape& s,
                       const BatchCache::TanhLayer& l, const LayerOut& bar,
                       Eigen::VectorXd& grad, bool need_input) {
  const auto slope = (1.0 - l.s.array().square()).eval();
  const Matrix zb1 = (slope * bar.d1.array()).matrix();
  const Matrix zb2 = (slope * bar.d2.array()).matrix();
  const auto stot =
      bar.v.array() - 2.0 * l.s.array() * (l.z1.array() * bar.d1.array() +
                                           l.z2.array() * bar.d2.array());
  const Matrix zb = (slope * stot).matrix();
  Eigen::Map<Matrix> gw(grad.data() + s.weight_offset(), s.rows, s.cols);
  gw.noalias() += zb * l.in.transpose();
  gw.noalias() += zb1 * l.in1.transpose();
  gw.noalias() += zb2 * l.in2.transpose();
  grad.segment(static_cast<Eigen::Index>(s.bias_offset()), s.rows) += zb.rowwise().sum();
  if (!need_input) return {};
  const auto w = weight(p, s);
  return {w.transpose() * zb, w.transpose() * zb1, w.transpose() * zb2};
}

}  // namespace

std::size_t Architecture::parameter_count() const {
  std::size_t n = 0;
  for (const auto& s : layer_shapes(*this)) n += s.size();
  return n;
}

void Architecture::validate() const {
  if (inputs != 2) throw std::invalid_argument("network input dimension must be 2");
  if (width < 1) throw std::invalid_argument("network width must be >= 1");
  if (blocks < 0) throw std::invalid_argument("residual block count must be >= 0");
  if (outputs < 1) throw std::invalid_argument("network output dimension must be >= 1");
}

std::vector<LayerShape> layer_shapes(const Architecture& arch) {
  std::vector<LayerShape> out;
  std::size_t offset = 0;
  auto add = [&](int rows, int cols) {
    out.push_back({rows, cols, offset});
    offset += out.back().size();
  };
  add(arch.width, arch.inputs);
  for (int b = 0; b < 2 * arch.blocks; ++b) add(arch.width, arch.width);
  add(arch.outputs, arch.width);
  return out;
}

NetworkParams init_xavier(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  NetworkParams p{arch, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(arch.parameter_count()))};
  std::mt19937_64 rng(seed);
  for (const auto& s : layer_shapes(arch)) {
    const double bound = std::sqrt(6.0 / (s.rows + s.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (int k = 0; k < s.rows * s.cols; ++k) {
      p.theta[static_cast<Eigen::Index>(s.weight_offset()) + k] = dist(rng);
    }
  }
  return p;
}

Eigen::VectorXd forward(const NetworkParams& params, const Vec2& x) {
  const std::span<const double> theta(params.theta.data(),
                                      static_cast<std::size_t>(params.theta.size()));
  const auto out = evaluate_network<double, double>(params.arch, theta, x.x(), x.y());
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

SpatialOutput forward_with_spatial_grad(const NetworkParams& params, const Vec2& x) {
  using D = ad::Dual2<double>;
  const std::span<const double> theta(params.theta.data(),
                                      static_cast<std::size_t>(params.theta.size()));
  const auto out =
      evaluate_network<D, double>(params.arch, theta, D{x.x(), 1.0, 0.0}, D{x.y(), 0.0, 1.0});
  SpatialOutput r;
  r.value.resize(static_cast<Eigen::Index>(out.size()));
  r.jacobian.resize(static_cast<Eigen::Index>(out.size()), 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    r.value[k] = out[i].v;
    r.jacobian(k, 0) = out[i].d1;
    r.jacobian(k, 1) = out[i].d2;
  }
  return r;
}

Eigen::VectorXd loss_gradient(const NetworkParams& params, std::span<const Vec2> points,
                              const LossHead& head, double* loss) {
  using D = ad::Dual2<ad::Var>;
  ad::Tape tape;
  std::vector<ad::Var> theta;
  theta.reserve(static_cast<std::size_t>(params.theta.size()));
  for (Eigen::Index i = 0; i < params.theta.size(); ++i) {
    theta.push_back(tape.variable(params.theta[i]));
  }
  const ad::Var one = tape.constant(1.0);
  const ad::Var zero = tape.constant(0.0);
  std::vector<TapeOutput> outputs;
  outputs.reserve(points.size());
  for (const auto& x : points) {
    const D x1{tape.constant(x.x()), one, zero};
    const D x2{tape.constant(x.y()), zero, one};
    const auto out = evaluate_network<D, ad::Var>(params.arch, theta, x1, x2);
    TapeOutput o;
    for (const auto& e : out) {
      o.value.push_back(e.v);
      o.d1.push_back(e.d1);
      o.d2.push_back(e.d2);
    }
    outputs.push_back(std::move(o));
  }
  const ad::Var l = head(tape, outputs);
  tape.check_finite();
  if (loss) *loss = l.value();
  const auto adj = tape.adjoints(l);
  Eigen::VectorXd grad(params.theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    grad[static_cast<Eigen::Index>(i)] = adj[theta[i].index()];
  }
  return grad;
}

BatchOutputs forward_batch(const NetworkParams& params, const Eigen::Matrix2Xd& points,
                           BatchCache* cache) {
  const auto shapes = layer_shapes(params.arch);
  const Eigen::Index n = points.cols();
  Matrix e1 = Matrix::Zero(2, n);
  Matrix e2 = Matrix::Zero(2, n);
  e1.row(0).setOnes();
  e2.row(1).setOnes();

  BatchCache local;
  BatchCache& c = cache ? *cache : local;
  c.layers.clear();
  c.layers.push_back(tanh_layer(params, shapes[0], points, e1, e2));
  LayerOut a = layer_output(c.layers.back());
  for (int b = 0; b < params.arch.blocks; ++b) {
    const auto& s1 = shapes[static_cast<std::size_t>(1 + 2 * b)];
    const auto& s2 = shapes[static_cast<std::size_t>(2 + 2 * b)];
    c.layers.push_back(tanh_layer(params, s1, a.v, a.d1, a.d2));
    const LayerOut h = layer_output(c.layers.back());
    c.layers.push_back(tanh_layer(params, s2, h.v, h.d1, h.d2));
    const LayerOut g = layer_output(c.layers.back());
    a.v += g.v;
    a.d1 += g.d1;
    a.d2 += g.d2;
  }
  const auto& so = shapes.back();
  const auto w = weight(params, so);
  BatchOutputs out;
  out.value = (w * a.v).colwise() + bias(params, so);
  out.d1 = w * a.d1;
  out.d2 = w * a.d2;
  c.last = std::move(a.v);
  c.last1 = std::move(a.d1);
  c.last2 = std::move(a.d2);
  return out;
}

Eigen::VectorXd backward_batch(const NetworkParams& params, const BatchCache& cache,
                               const BatchOutputs& adjoint) {
  const auto shapes = layer_shapes(params.arch);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.theta.size());
  const auto& so = shapes.back();
  {
    Eigen::Map<Matrix> gw(grad.data() + so.weight_offset(), so.rows, so.cols);
    gw.noalias() += adjoint.value * cache.last.transpose();
    gw.noalias() += adjoint.d1 * cache.last1.transpose();
    gw.noalias() += adjoint.d2 * cache.last2.transpose();
    grad.segment(static_cast<Eigen::Index>(so.bias_offset()), so.rows) +=
        adjoint.value.rowwise().sum();
  }
  const auto w = weight(params, so);
  LayerOut abar{w.transpose() * adjoint.value, w.transpose() * adjoint.d1,
                w.transpose() * adjoint.d2};
  for (int b = params.arch.blocks - 1; b >= 0; --b) {
    const auto i1 = static_cast<std::size_t>(1 + 2 * b);
    const auto i2 = i1 + 1;
    // a_out = a_in + g(h(a_in)): the skip path passes abar through unchanged.
    const LayerOut hbar = tanh_backward(params, shapes[i2], cache.layers[i2], abar, grad, true);
    const LayerOut inbar = tanh_backward(params, shapes[i1], cache.layers[i1], hbar, grad, true);
    abar.v += inbar.v;
    abar.d1 += inbar.d1;
    abar.d2 += inbar.d2;
  }
  tanh_backward(params, shapes[0], cache.layers[0], abar, grad, false);
  return grad;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  const auto& a = ckpt.params.arch;
  os << kCheckpointTag << '\n';
  os << "arch " << a.inputs << ' ' << a.width << ' ' << a.blocks << ' ' << a.outputs << '\n';
  for (const auto& [k, v] : ckpt.metadata) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("checkpoint metadata must be single-line, key without spaces");
    }
    os << "meta " << k << ' ' << v << '\n';
  }
  os << "params " << ckpt.params.theta.size() << '\n';
  os << std::hexfloat;
  for (Eigen::Index i = 0; i < ckpt.params.theta.size(); ++i) os << ckpt.params.theta[i] << '\n';
  if (!os) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("malformed checkpoint " + path + ": " + why);
  };
  std::string line;
  if (!std::getline(is, line) || line != kCheckpointTag) fail("missing format tag");
  Checkpoint ckpt;
  bool have_arch = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "arch") {
      auto& a = ckpt.params.arch;
      if (!(ls >> a.inputs >> a.width >> a.blocks >> a.outputs)) fail("bad arch line");
      a.validate();
      have_arch = true;
    } else if (key == "meta") {
      std::string k;
      ls >> k;
      std::string v;
      std::getline(ls >> std::ws, v);
      ckpt.metadata[k] = v;
    } else if (key == "params") {
      if (!have_arch) fail("params before arch");
      Eigen::Index n = 0;
      if (!(ls >> n) || n != static_cast<Eigen::Index>(ckpt.params.arch.parameter_count())) {
        fail("parameter count does not match architecture");
      }
      ckpt.params.theta.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::getline(is, line)) fail("truncated parameter list");
        char* end = nullptr;
        ckpt.params.theta[i] = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) fail("unparsable parameter at index " + std::to_string(i));
      }
      return ckpt;
    } else if (!key.empty()) {
      fail("unknown record '" + key + "'");
    }
  }
  fail("no parameter block");
  return ckpt;
}

}  // namespace binn
