#pragma once

#include "binn/ad.hpp"
#include "binn/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace binn {

// Input dense layer (tanh) of width `width`, `blocks` residual blocks of two
// tanh dense layers each, and a linear output layer.
struct Architecture {
  int inputs = 2;
  int width = 20;
  int blocks = 2;
  int outputs = 1;

  std::size_t parameter_count() const;
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

// Location of one dense layer inside the flat parameter vector. The weight
// matrix is stored column-major (rows = fan_out) followed by the bias.
struct LayerShape {
  int rows;
  int cols;
  std::size_t offset;

  std::size_t weight_offset() const { return offset; }
  std::size_t bias_offset() const { return offset + static_cast<std::size_t>(rows * cols); }
  std::size_t size() const { return static_cast<std::size_t>(rows * (cols + 1)); }
};

std::vector<LayerShape> layer_shapes(const Architecture& arch);

struct NetworkParams {
  Architecture arch;
  Eigen::VectorXd theta;
};

NetworkParams init_xavier(const Architecture& arch, std::uint64_t seed);

// Value and spatial Jacobian (outputs × 2) at one point.
struct SpatialOutput {
  Eigen::VectorXd value;
  Eigen::Matrix<double, Eigen::Dynamic, 2> jacobian;
};

Eigen::VectorXd forward(const NetworkParams& params, const Vec2& x);
SpatialOutput forward_with_spatial_grad(const NetworkParams& params, const Vec2& x);

// Generic single-point evaluator shared by the double, Dual2 and tape paths.
// `Act` is the activation type, `W` the parameter scalar type.
template <class Act, class W>
std::vector<Act> evaluate_network(const Architecture& arch, std::span<const W> theta,
                                  const Act& x1, const Act& x2) {
  using std::tanh;
  using ad::tanh;
  const auto shapes = layer_shapes(arch);
  auto dense = [&](const LayerShape& s, const std::vector<Act>& in) {
    std::vector<Act> out;
    out.reserve(static_cast<std::size_t>(s.rows));
    for (int r = 0; r < s.rows; ++r) {
      const auto wr = [&](int c) -> const W& {
        return theta[s.weight_offset() + static_cast<std::size_t>(c * s.rows + r)];
      };
      Act acc = wr(0) * in[0];
      for (int c = 1; c < s.cols; ++c) acc = acc + wr(c) * in[static_cast<std::size_t>(c)];
      out.push_back(acc + theta[s.bias_offset() + static_cast<std::size_t>(r)]);
    }
    return out;
  };
  auto activate = [](std::vector<Act> v) {
    for (auto& e : v) e = tanh(e);
    return v;
  };
  std::vector<Act> a = activate(dense(shapes[0], {x1, x2}));
  for (int b = 0; b < arch.blocks; ++b) {
    const auto h = activate(dense(shapes[static_cast<std::size_t>(1 + 2 * b)], a));
    const auto g = activate(dense(shapes[static_cast<std::size_t>(2 + 2 * b)], h));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] + g[i];
  }
  return dense(shapes.back(), a);
}

// Network outputs on the tape: value and the two spatial derivatives per
// output component.
struct TapeOutput {
  std::vector<ad::Var> value;
  std::vector<ad::Var> d1;
  std::vector<ad::Var> d2;
};

using LossHead = std::function<ad::Var(ad::Tape&, const std::vector<TapeOutput>&)>;

// Exact parameter gradient of head(φ, ∇φ evaluated at `points`) through the
// nested forward/reverse tape. Returns the gradient; the loss is written to
// `loss` when provided.
Eigen::VectorXd loss_gradient(const NetworkParams& params, std::span<const Vec2> points,
                              const LossHead& head, double* loss = nullptr);

// Batched evaluation for training. Columns are points; every output matrix is
// outputs × points.
struct BatchOutputs {
  Eigen::MatrixXd value;
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;
};

class BatchCache {
 public:
  struct TanhLayer {
    Eigen::MatrixXd in;
    Eigen::MatrixXd in1;
    Eigen::MatrixXd in2;
    Eigen::MatrixXd s;
    Eigen::MatrixXd z1;
    Eigen::MatrixXd z2;
  };
  std::vector<TanhLayer> layers;
  Eigen::MatrixXd last;
  Eigen::MatrixXd last1;
  Eigen::MatrixXd last2;
};

BatchOutputs forward_batch(const NetworkParams& params, const Eigen::Matrix2Xd& points,
                           BatchCache* cache = nullptr);

// Reverse pass through the cached batch: given adjoints of the outputs
// (value and both tangents) returns ∂L/∂θ.
Eigen::VectorXd backward_batch(const NetworkParams& params, const BatchCache& cache,
                               const BatchOutputs& adjoint);

// Checkpoint: text header (format tag, architecture, metadata) followed by
// every parameter as a hexadecimal float, so reloading is bit-exact.
struct Checkpoint {
  NetworkParams params;
  std::map<std::string, std::string> metadata;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace binn
