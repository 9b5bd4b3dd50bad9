#include "auv/rewards.hpp"

#include <cmath>

namespace auv {

RewardConfig RewardConfig::from_config(const Config& cfg) {
  RewardConfig r;
  r.c_chi = cfg.get_double("reward.c_chi");
  r.c_upsilon = cfg.get_double("reward.c_upsilon");
  r.c_phi = cfg.get_double("reward.c_phi");
  r.c_r = cfg.get_double("reward.c_r");
  r.c_delta_r = cfg.get_double("reward.c_delta_r");
  r.c_delta_s = cfg.get_double("reward.c_delta_s");
  r.lambda_r = cfg.get_double("reward.lambda_r");
  r.gamma_c = cfg.get_double("reward.gamma_c");
  r.eps_c = cfg.get_double("reward.eps_c");
  r.eps_oa = cfg.get_double("reward.eps_oa");
  r.gamma_a = cfg.get_double("reward.gamma_a_deg") * M_PI / 180.0;
  return r;
}

double reward_pf(double chi_err, double upsilon_err, const RewardConfig& cfg) {
  return cfg.c_chi * chi_err * chi_err + cfg.c_upsilon * upsilon_err * upsilon_err;
}

double beta_oa(double theta, double psi, const RewardConfig& cfg) {
  return (1.0 - 2.0 * std::abs(theta) / cfg.gamma_a) *
             (1.0 - 2.0 * std::abs(psi) / cfg.gamma_a) +
         cfg.eps_oa;
}

double reward_oa(const SonarImage& image, const SonarConfig& sonar, const RewardConfig& cfg) {
  double weighted = 0.0;
  double total_weight = 0.0;
  for (int row = 0; row < image.rows; ++row) {
    const double theta = sonar.ray_elevation(row);
    for (int col = 0; col < image.cols; ++col) {
      const double psi = sonar.ray_azimuth(col);
      const double beta = beta_oa(theta, psi, cfg);
      const double c = closeness(image.at(row, col), image.max_range);
      const double denom = cfg.gamma_c * std::max((1.0 - c) * (1.0 - c), cfg.eps_c);
      weighted += beta / denom;
      total_weight += beta;
    }
  }
  return -weighted / total_weight;
}

double total_reward(double chi_err, double upsilon_err, const SonarImage& image,
                    const SonarConfig& sonar, double roll, double roll_rate, double rudder,
                    double elevator, const RewardConfig& cfg) {
  return cfg.lambda_r * reward_pf(chi_err, upsilon_err, cfg) +
         (1.0 - cfg.lambda_r) * reward_oa(image, sonar, cfg) + cfg.c_phi * roll * roll +
         cfg.c_r * roll_rate * roll_rate + cfg.c_delta_r * rudder * rudder +
         cfg.c_delta_s * elevator * elevator;
}

}  // namespace auv
