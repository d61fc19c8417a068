#include "binn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace binn {

namespace {

struct Chunk {
  Eigen::Index first;
  Eigen::Index count;
};

std::vector<Chunk> chunks(Eigen::Index n, int threads) {
  const Eigen::Index k = std::max<Eigen::Index>(1, std::min<Eigen::Index>(threads, n));
  std::vector<Chunk> out;
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index lo = n * i / k;
    const Eigen::Index hi = n * (i + 1) / k;
    out.push_back({lo, hi - lo});
  }
  return out;
}

template <class F>
void run_parallel(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back([&f, i] { f(i); });
  for (auto& t : pool) t.join();
}

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in (0, 1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("Adam epsilon must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (batch < 0) throw std::invalid_argument("batch size must be >= 0");
  if (checkpoint_every < 1) throw std::invalid_argument("checkpoint interval must be >= 1");
}

void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, AdamState& state,
               const TrainConfig& cfg) {
  if (grad.size() != theta.size()) throw TrainingError("gradient size does not match parameters");
  if (!grad.allFinite()) {
    throw TrainingError("non-finite gradient at step " + std::to_string(state.t + 1));
  }
  if (state.m.size() != theta.size()) {
    state.m = Eigen::VectorXd::Zero(theta.size());
    state.v = Eigen::VectorXd::Zero(theta.size());
  }
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  theta.array() -= cfg.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
}

double loss_and_gradient(const ResidualOperator& op, const NetworkParams& params,
                         Eigen::VectorXd* grad, int threads, const Eigen::VectorXd* row_weights) {
  const Eigen::Matrix2Xd coords = op.points.coordinates();
  const Eigen::Index ch = 3 * op.outputs;
  const auto parts = chunks(coords.cols(), threads);
  std::vector<BatchCache> caches(parts.size());
  std::vector<Eigen::VectorXd> partial(parts.size());

  run_parallel(parts.size(), threads, [&](std::size_t i) {
    const auto& c = parts[i];
    const BatchOutputs out = forward_batch(params, coords.middleCols(c.first, c.count), &caches[i]);
    const Eigen::MatrixXd z = channels_from_outputs(out);
    const Eigen::Map<const Eigen::VectorXd> zf(z.data(), z.size());
    partial[i] = op.M.middleCols(c.first * ch, c.count * ch) * zf;
  });
  Eigen::VectorXd r = op.b;
  for (const auto& p : partial) r += p;
  const Eigen::VectorXd& w = row_weights ? *row_weights : op.weights;
  const double loss = (w.array() * r.array().square()).sum();
  if (!grad) return loss;

  const Eigen::VectorXd rbar = 2.0 * w.cwiseProduct(r);
  std::vector<Eigen::VectorXd> grads(parts.size());
  run_parallel(parts.size(), threads, [&](std::size_t i) {
    const auto& c = parts[i];
    const Eigen::VectorXd zbar = op.M.middleCols(c.first * ch, c.count * ch).transpose() * rbar;
    BatchOutputs adj;
    adj.value.resize(op.outputs, c.count);
    adj.d1.resize(op.outputs, c.count);
    adj.d2.resize(op.outputs, c.count);
    for (Eigen::Index p = 0; p < c.count; ++p) {
      for (int k = 0; k < op.outputs; ++k) {
        adj.value(k, p) = zbar[p * ch + 3 * k];
        adj.d1(k, p) = zbar[p * ch + 3 * k + 1];
        adj.d2(k, p) = zbar[p * ch + 3 * k + 2];
      }
    }
    grads[i] = backward_batch(params, caches[i], adj);
  });
  *grad = grads[0];
  for (std::size_t i = 1; i < grads.size(); ++i) *grad += grads[i];
  return loss;
}

TrainResult train(const ResidualOperator& op, const Architecture& arch, const TrainConfig& cfg,
                  std::optional<NetworkParams> initial) {
  cfg.validate();
  if (arch.outputs != op.outputs) {
    throw std::invalid_argument("network output dimension does not match the problem");
  }
  TrainResult res;
  res.params = initial ? *initial : init_xavier(arch, cfg.seed);
  AdamState state;
  std::mt19937_64 batch_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t ns = op.sources.size();
  const bool minibatch = cfg.batch > 0 && static_cast<std::size_t>(cfg.batch) < ns;
  std::vector<std::size_t> order(ns);
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd batch_weights;

  NetworkParams last_finite = res.params;
  Eigen::VectorXd grad;
  for (int it = 0; it <= cfg.iterations; ++it) {
    const bool step = it < cfg.iterations;
    const Eigen::VectorXd* weights = nullptr;
    if (step && minibatch) {
      std::shuffle(order.begin(), order.end(), batch_rng);
      batch_weights = Eigen::VectorXd::Zero(op.weights.size());
      const double scale = static_cast<double>(ns) / cfg.batch;
      for (int j = 0; j < cfg.batch; ++j) {
        const auto& sp = op.sources[order[static_cast<std::size_t>(j)]];
        const auto r0 = static_cast<Eigen::Index>(sp.row);
        batch_weights.segment(r0, op.outputs) = scale * op.weights.segment(r0, op.outputs);
      }
      weights = &batch_weights;
    }
    double l = 0.0;
    if (weights) {
      // The history records the full-batch loss; the step uses the batch.
      l = loss_and_gradient(op, res.params, nullptr, cfg.threads);
      loss_and_gradient(op, res.params, &grad, cfg.threads, weights);
    } else {
      l = loss_and_gradient(op, res.params, step ? &grad : nullptr, cfg.threads);
    }
    if (!std::isfinite(l)) {
      res.aborted = true;
      res.message = "non-finite loss at iteration " + std::to_string(it) +
                    "; returning the last finite state";
      res.params = last_finite;
      if (!cfg.checkpoint_path.empty()) {
        save_checkpoint(cfg.checkpoint_path, {res.params, cfg.checkpoint_metadata});
      }
      return res;
    }
    res.loss_history.push_back(l);
    last_finite = res.params;
    if (!step) break;
    try {
      adam_step(res.params.theta, grad, state, cfg);
    } catch (const TrainingError& e) {
      res.aborted = true;
      res.message = std::string(e.what()) + " (iteration " + std::to_string(it) + ")";
      if (!cfg.checkpoint_path.empty()) {
        save_checkpoint(cfg.checkpoint_path, {res.params, cfg.checkpoint_metadata});
      }
      return res;
    }
    if (!cfg.checkpoint_path.empty() && (it + 1) % cfg.checkpoint_every == 0) {
      save_checkpoint(cfg.checkpoint_path, {res.params, cfg.checkpoint_metadata});
    }
  }
  if (!cfg.checkpoint_path.empty()) {
    save_checkpoint(cfg.checkpoint_path, {res.params, cfg.checkpoint_metadata});
  }
  return res;
}

}  // namespace binn
