#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "auv/config.hpp"
#include "auv/environment.hpp"
#include "auv/mlp.hpp"
#include "auv/rng.hpp"

namespace auv {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  int actors = 8;
  int horizon = 1024;
  int epochs = 4;
  int minibatch = 256;
  double learning_rate = 3e-4;
  double grad_clip = 0.5;
  double value_coeff = 0.5;
  double entropy_coeff = 0.0;
  long total_steps = 500000;
  double log_std_init = -0.7;
  int hidden = 64;

  static PpoConfig from_config(const Config& cfg);
};

/// Separate Gaussian-policy and value networks over one flat parameter
/// vector: [policy trunk | 2 log-std parameters | value trunk].
/// The log-std is state independent and clamped to [-5, 2] in use.
class ActorCritic {
 public:
  ActorCritic(int obs_dim, int act_dim, int hidden, double log_std_init, Rng& rng);

  int obs_dim() const { return policy_spec_.sizes.front(); }
  int act_dim() const { return act_dim_; }
  const MlpSpec& policy_spec() const { return policy_spec_; }
  const MlpSpec& value_spec() const { return value_spec_; }
  int log_std_offset() const { return log_std_offset_; }
  int value_offset() const { return value_offset_; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  /// Deterministic forward pass of the policy head: action mean and std.
  /// Throws SimulationDivergedError on non-finite output.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> policy_forward(const Eigen::VectorXd& obs) const;

  double value(const Eigen::VectorXd& obs) const;

  /// Sample an action and return its log-probability under the policy.
  Eigen::VectorXd sample_action(const Eigen::VectorXd& obs, Rng& rng, double* log_prob) const;

  /// Gaussian log-density of an action under the current policy.
  double log_prob(const Eigen::VectorXd& obs, const Eigen::VectorXd& action) const;

  /// Versioned text checkpoint with a shape header.
  void save(const std::string& path) const;
  static ActorCritic load(const std::string& path);

 private:
  ActorCritic() = default;
  friend struct PpoUpdater;

  MlpSpec policy_spec_;
  MlpSpec value_spec_;
  int act_dim_ = 0;
  int log_std_offset_ = 0;
  int value_offset_ = 0;
  Eigen::VectorXd params_;
};

/// Per-rollout training data; one row per (actor, timestep) pair.
struct RolloutBatch {
  Eigen::MatrixXd observations;  // n x obs_dim
  Eigen::MatrixXd actions;       // n x act_dim
  Eigen::VectorXd log_probs;     // under the collection-time policy
  Eigen::VectorXd rewards;
  Eigen::VectorXd values;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;

  int size() const { return static_cast<int>(rewards.size()); }
};

/// GAE over one contiguous trajectory segment. bootstrap_value is
/// V(s_{T+1}); pass 0 when the segment ends in a true terminal state.
std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        double bootstrap_value, double gamma, double lambda);

/// Mean clipped-surrogate objective over a batch.
double clipped_surrogate(const Eigen::VectorXd& log_prob_new, const Eigen::VectorXd& log_prob_old,
                         const Eigen::VectorXd& advantage, double epsilon);

/// Mean PPO loss over the given batch rows and its gradient with respect to
/// the flat parameter vector:
///   loss = -surrogate + value_coeff * 0.5 (v - R)^2 - entropy_coeff * H.
/// `adv` holds the (already normalized) advantages for the whole batch.
/// grad is overwritten.
double ppo_loss_gradient(const ActorCritic& net, const RolloutBatch& batch,
                         const std::vector<int>& rows, const Eigen::VectorXd& adv,
                         const PpoConfig& cfg, Eigen::VectorXd& grad);

struct UpdateDiagnostics {
  double surrogate = 0.0;   // mean clipped surrogate after the update
  double value_loss = 0.0;  // mean squared value error after the update
  double approx_kl = 0.0;   // mean(logp_old - logp_new) after the update
};

/// K epochs of shuffled minibatch ascent on the clipped surrogate minus the
/// value-loss term. Advantages are normalized to zero mean and unit std
/// per batch before the first epoch. Throws SimulationDivergedError on
/// non-finite loss.
UpdateDiagnostics update(ActorCritic& net, Adam& optimizer, const RolloutBatch& batch,
                         const PpoConfig& cfg, Rng& rng);

struct CurvePoint {
  int iteration = 0;
  long env_steps = 0;
  double mean_return = 0.0;
  double success_rate = 0.0;     // over episodes finished this iteration
  double mean_tracking_error = 0.0;
  int level = 0;
  double value_loss = 0.0;  // post-update, from UpdateDiagnostics
  double approx_kl = 0.0;
};

struct TrainResult {
  std::shared_ptr<ActorCritic> net;
  std::vector<CurvePoint> curves;
};

void save_curves_csv(const std::vector<CurvePoint>& curves, const std::string& path);

/// Full curriculum training loop: collect actors x horizon steps, compute
/// GAE, update, promote the curriculum level per the rolling-success rule.
/// Fully seeded and deterministic (actors run sequentially in fixed order).
TrainResult train(const Config& cfg,
                  const std::function<void(const CurvePoint&)>& on_iteration = nullptr);

}  // namespace auv
