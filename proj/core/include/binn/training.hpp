#pragma once

#include "binn/assembly.hpp"
#include "binn/network.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace binn {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int iterations = 1000;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 1;
  int threads = 1;
  // Source points per step; 0 = full batch.
  int batch = 0;
  int checkpoint_every = 1000;
  std::string checkpoint_path;  // empty disables checkpoints
  std::map<std::string, std::string> checkpoint_metadata;

  void validate() const;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
};

// Bias-corrected Adam. Throws TrainingError on a non-finite gradient.
void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, AdamState& state,
               const TrainConfig& cfg);

// Loss Σ w_r R_r² of the precomputed operator and, when `grad` is given, its
// parameter gradient. Points are split into `threads` contiguous chunks whose
// partial sums are reduced in a fixed order.
double loss_and_gradient(const ResidualOperator& op, const NetworkParams& params,
                         Eigen::VectorXd* grad, int threads = 1,
                         const Eigen::VectorXd* row_weights = nullptr);

struct TrainResult {
  NetworkParams params;
  std::vector<double> loss_history;  // entry k is the loss after k steps
  bool aborted = false;
  std::string message;
};

TrainResult train(const ResidualOperator& op, const Architecture& arch, const TrainConfig& cfg,
                  std::optional<NetworkParams> initial = std::nullopt);

}  // namespace binn
