#include "auv/mlp.hpp"

#include <cmath>

namespace auv {

Eigen::VectorXd mlp_init(const MlpSpec& spec, Rng& rng, double final_scale) {
  Eigen::VectorXd params(spec.param_count());
  for (int l = 0; l < spec.layer_count(); ++l) {
    const int in = spec.sizes[l], out = spec.sizes[l + 1];
    const double limit = std::sqrt(6.0 / (in + out)) * (l + 1 == spec.layer_count() ? final_scale : 1.0);
    double* p = params.data() + spec.layer_offset(l);
    for (int i = 0; i < out * in; ++i) p[i] = rng.uniform(-limit, limit);
    for (int i = 0; i < out; ++i) p[out * in + i] = 0.0;
  }
  return params;
}

Eigen::VectorXd mlp_forward(const MlpSpec& spec, const Eigen::VectorXd& params,
                            const Eigen::VectorXd& input, MlpCache* cache) {
  if (cache) {
    cache->clear();
    cache->push_back(input);
  }
  Eigen::VectorXd x = input;
  for (int l = 0; l < spec.layer_count(); ++l) {
    const int in = spec.sizes[l], out = spec.sizes[l + 1];
    const double* p = params.data() + spec.layer_offset(l);
    const Eigen::Map<const Eigen::MatrixXd> w(p, out, in);
    const Eigen::Map<const Eigen::VectorXd> b(p + out * in, out);
    x = (w * x + b).eval();
    if (l + 1 < spec.layer_count()) x = x.array().tanh().matrix();
    if (cache) cache->push_back(x);
  }
  return x;
}

void mlp_backward(const MlpSpec& spec, const Eigen::VectorXd& params, const MlpCache& cache,
                  const Eigen::VectorXd& grad_output, Eigen::VectorXd& grad) {
  Eigen::VectorXd delta = grad_output;
  for (int l = spec.layer_count() - 1; l >= 0; --l) {
    const int in = spec.sizes[l], out = spec.sizes[l + 1];
    const double* p = params.data() + spec.layer_offset(l);
    const Eigen::Map<const Eigen::MatrixXd> w(p, out, in);
    double* g = grad.data() + spec.layer_offset(l);
    Eigen::Map<Eigen::MatrixXd> gw(g, out, in);
    Eigen::Map<Eigen::VectorXd> gb(g + out * in, out);
    gw += delta * cache[l].transpose();
    gb += delta;
    if (l > 0) {
      // tanh'(z) = 1 - tanh(z)^2, with tanh(z) cached as the activation.
      delta = (w.transpose() * delta).cwiseProduct(
          (1.0 - cache[l].array().square()).matrix());
    }
  }
}

}  // namespace auv
