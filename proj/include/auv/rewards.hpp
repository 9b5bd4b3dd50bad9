#pragma once

#include "auv/config.hpp"
#include "auv/perception.hpp"

namespace auv {

/// Weights of the composite reward. Path weights are negative; lambda_r in
/// [0, 1] trades path-following against obstacle avoidance.
struct RewardConfig {
  double c_chi = -1.0;
  double c_upsilon = -1.0;
  double c_phi = -0.5;
  double c_r = -0.5;
  double c_delta_r = -0.1;
  double c_delta_s = -0.1;
  double lambda_r = 0.9;
  double gamma_c = 1.0;
  double eps_c = 1e-4;
  double eps_oa = 0.05;
  double gamma_a = 140.0 * M_PI / 180.0;

  static RewardConfig from_config(const Config& cfg);
};

/// Quadratic course/elevation error penalty: c_chi chi~^2 + c_upsilon ups~^2.
double reward_pf(double chi_err, double upsilon_err, const RewardConfig& cfg);

/// Orientation weight of a sonar cell: (1 - 2|theta|/gamma_a)(1 - 2|psi|/gamma_a) + eps_oa.
double beta_oa(double theta, double psi, const RewardConfig& cfg);

/// Obstacle-avoidance penalty: weighted average over the raw sonar grid of
/// -(gamma_c max((1 - c(d))^2, eps_c))^-1.
double reward_oa(const SonarImage& image, const SonarConfig& sonar, const RewardConfig& cfg);

/// Full per-step reward: lambda_r blend of the two objectives plus roll,
/// roll-rate and fin-actuation penalties.
double total_reward(double chi_err, double upsilon_err, const SonarImage& image,
                    const SonarConfig& sonar, double roll, double roll_rate, double rudder,
                    double elevator, const RewardConfig& cfg);

}  // namespace auv
