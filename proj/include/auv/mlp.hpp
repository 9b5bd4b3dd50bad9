#pragma once

#include <Eigen/Dense>
#include <vector>

#include "auv/rng.hpp"

namespace auv {

/// Fully connected network with tanh hidden activations and a linear output,
/// operating on a flat parameter vector so that optimization, checkpointing
/// and finite-difference checks all see one contiguous buffer.
///
/// Layout per layer: weight matrix (out x in, column-major) then bias.
struct MlpSpec {
  std::vector<int> sizes;

  int layer_count() const { return static_cast<int>(sizes.size()) - 1; }

  int param_count() const {
    int n = 0;
    for (int l = 0; l < layer_count(); ++l) n += sizes[l + 1] * (sizes[l] + 1);
    return n;
  }

  int layer_offset(int layer) const {
    int n = 0;
    for (int l = 0; l < layer; ++l) n += sizes[l + 1] * (sizes[l] + 1);
    return n;
  }
};

/// Per-sample forward cache: activations[0] is the input, activations[l] the
/// tanh output of hidden layer l, activations.back() the linear output.
using MlpCache = std::vector<Eigen::VectorXd>;

/// Xavier-uniform initialization; the final layer is additionally scaled by
/// final_scale (small values keep the initial policy near zero output).
Eigen::VectorXd mlp_init(const MlpSpec& spec, Rng& rng, double final_scale = 0.01);

Eigen::VectorXd mlp_forward(const MlpSpec& spec, const Eigen::VectorXd& params,
                            const Eigen::VectorXd& input, MlpCache* cache = nullptr);

/// Accumulate d(loss)/d(params) into grad given d(loss)/d(output).
void mlp_backward(const MlpSpec& spec, const Eigen::VectorXd& params, const MlpCache& cache,
                  const Eigen::VectorXd& grad_output, Eigen::VectorXd& grad);

/// Adaptive-moment gradient descent with bias correction.
class Adam {
 public:
  Adam(int param_count, double learning_rate)
      : lr_(learning_rate),
        m_(Eigen::VectorXd::Zero(param_count)),
        v_(Eigen::VectorXd::Zero(param_count)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    params -= (lr_ / bc1) * m_.cwiseQuotient(((v_ / bc2).cwiseSqrt().array() + eps_).matrix());
  }

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace auv
