#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "auv/config.hpp"
#include "auv/control.hpp"
#include "auv/dynamics.hpp"
#include "auv/path.hpp"
#include "auv/perception.hpp"
#include "auv/rewards.hpp"
#include "auv/rng.hpp"

namespace auv {

enum class Difficulty { kBeginner, kIntermediate, kProficient, kAdvanced, kExpert };

Difficulty difficulty_from_string(const std::string& name);
std::string to_string(Difficulty d);

/// A fully specified episode: path waypoints, obstacles, disturbance flag.
struct ScenarioConfig {
  Difficulty difficulty = Difficulty::kBeginner;
  std::uint64_t seed = 0;
  WaypointSet waypoints;
  std::vector<Obstacle> obstacles;
  bool current_enabled = false;
};

enum class EpisodeStatus { kRunning, kSuccess, kCollision, kTimeout, kFault };

std::string to_string(EpisodeStatus s);

struct EpisodeOutcome {
  EpisodeStatus status = EpisodeStatus::kRunning;
  int steps = 0;
  double avg_tracking_error = 0.0;  // mean over steps of |(e, h_err)|
};

/// One trajectory-log row per control step.
struct StepRecord {
  double time = 0.0;
  VehicleState state;
  Eigen::Vector2d action = Eigen::Vector2d::Zero();
  double rudder = 0.0, elevator = 0.0, propeller = 0.0;
  double cross_track = 0.0, vertical_track = 0.0;
  double chi_err = 0.0, upsilon_err = 0.0;
  double reward = 0.0, reward_pf_part = 0.0, reward_oa_part = 0.0;
};

/// Deterministic scenario for the given difficulty and seed. Obstacles for
/// advanced and expert levels are drawn from the same stream, so the two
/// levels differ only in the current flag.
ScenarioConfig make_scenario(Difficulty difficulty, std::uint64_t seed, const Config& cfg);

/// Normalize raw signals into the 78-element observation, clipped to [-1, 1]:
/// 14 state/error/current scalars followed by the 64 pooled closeness values.
Eigen::VectorXd build_observation(const VehicleState& state, const Vector6d& current_body,
                                  double chi_err, double upsilon_err,
                                  const Eigen::MatrixXd& pooled);

/// Episode orchestration: reset/step semantics over the simulator stack.
class Environment {
 public:
  static constexpr int kObservationDim = 78;
  static constexpr int kActionDim = 2;

  Environment(ScenarioConfig scenario, const Config& cfg);

  /// Place the AUV at the path start, aligned with the initial tangent and at
  /// cruise speed; sample the episode's current direction from the seed.
  Eigen::VectorXd reset();

  struct StepResult {
    Eigen::VectorXd observation;
    double reward = 0.0;
    bool done = false;
    EpisodeStatus status = EpisodeStatus::kRunning;
  };

  /// Advance one control step. action in [-1, 1]^2 maps affinely to fin
  /// angles; the propeller is PI-controlled. Throws std::logic_error if the
  /// episode already ended.
  StepResult step(const Eigen::Vector2d& action);

  const ScenarioConfig& scenario() const { return scenario_; }
  const QpmiPath& path() const { return path_; }
  const VehicleState& state() const { return state_; }
  const EpisodeOutcome& outcome() const { return outcome_; }
  int max_steps() const { return max_steps_; }
  double dt() const { return dt_; }
  bool done() const { return done_; }

  void set_recording(bool on) { recording_ = on; }
  const std::vector<StepRecord>& trajectory() const { return trajectory_; }
  void save_trajectory_csv(const std::string& path) const;

 private:
  Eigen::VectorXd observe();
  void check_termination();

  ScenarioConfig scenario_;
  HydroParams hydro_;
  SonarConfig sonar_cfg_;
  RewardConfig reward_cfg_;
  FilterConfig filter_;
  PiController pi_;
  QpmiPath path_;

  double dt_ = 0.1;
  double lookahead_ = 9.0;
  double acceptance_radius_ = 1.0;
  double safety_radius_ = 1.0;
  int max_steps_ = 0;
  int sonar_every_ = 10;

  Rng rng_{0};
  VehicleState state_;
  ActuatorState actuators_;
  CurrentState current_;
  SonarImage sonar_image_;
  double s_hint_ = 0.0;
  double chi_err_ = 0.0, upsilon_err_ = 0.0;
  double cross_track_ = 0.0, vertical_track_ = 0.0;
  double tracking_error_sum_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
  EpisodeOutcome outcome_;
  bool recording_ = false;
  std::vector<StepRecord> trajectory_;
};

}  // namespace auv
