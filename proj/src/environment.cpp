#include "auv/environment.hpp"

#include <cmath>
#include <fstream>

namespace auv {

Difficulty difficulty_from_string(const std::string& name) {
  if (name == "beginner") return Difficulty::kBeginner;
  if (name == "intermediate") return Difficulty::kIntermediate;
  if (name == "proficient") return Difficulty::kProficient;
  if (name == "advanced") return Difficulty::kAdvanced;
  if (name == "expert") return Difficulty::kExpert;
  throw std::invalid_argument("unknown difficulty: " + name);
}

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::kBeginner: return "beginner";
    case Difficulty::kIntermediate: return "intermediate";
    case Difficulty::kProficient: return "proficient";
    case Difficulty::kAdvanced: return "advanced";
    case Difficulty::kExpert: return "expert";
  }
  return "?";
}

std::string to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::kRunning: return "running";
    case EpisodeStatus::kSuccess: return "success";
    case EpisodeStatus::kCollision: return "collision";
    case EpisodeStatus::kTimeout: return "timeout";
    case EpisodeStatus::kFault: return "fault";
  }
  return "?";
}

namespace {

WaypointSet random_waypoints(Rng& rng, const Config& cfg) {
  const int n_w = cfg.get_int("env.n_waypoints");
  const double len_min = cfg.get_double("env.segment_length_min");
  const double len_max = cfg.get_double("env.segment_length_max");
  const double max_az = cfg.get_double("env.max_turn_azimuth_deg") * M_PI / 180.0;
  const double max_el = cfg.get_double("env.max_turn_elevation_deg") * M_PI / 180.0;

  WaypointSet ws;
  ws.points.emplace_back(0.0, 0.0, 0.0);
  double az = rng.uniform(-M_PI, M_PI);
  double el = 0.0;
  for (int i = 1; i < n_w; ++i) {
    if (i > 1) {
      az = wrap_angle(az + rng.uniform(-max_az, max_az));
      el = std::clamp(el + rng.uniform(-max_el, max_el), -max_el, max_el);
    }
    const double len = rng.uniform(len_min, len_max);
    const Eigen::Vector3d dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                              -std::sin(el));
    ws.points.push_back(ws.points.back() + len * dir);
  }
  return ws;
}

// Normal-plane frame at arc length s: unit vectors spanning the plane
// orthogonal to the path tangent.
std::pair<Eigen::Vector3d, Eigen::Vector3d> normal_plane(const QpmiPath& path, double s) {
  const Eigen::Vector3d t = path.tangent(s);
  Eigen::Vector3d ref = std::abs(t.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d n1 = t.cross(ref).normalized();
  const Eigen::Vector3d n2 = t.cross(n1).normalized();
  return {n1, n2};
}

// True if the sphere stays clear of the first and last thirds of the path.
bool clears_path_ends(const QpmiPath& path, const Obstacle& obs, double margin) {
  const double length = path.total_length();
  const double keep = obs.radius + margin;
  for (double s = 0.0; s <= length; s += 1.0) {
    if (s > length / 3.0 && s < 2.0 * length / 3.0) continue;
    if ((path.position(s) - obs.center).norm() < keep) return false;
  }
  return true;
}

}  // namespace

ScenarioConfig make_scenario(Difficulty difficulty, std::uint64_t seed, const Config& cfg) {
  Rng rng(seed);
  Rng rng_path = rng.fork(0);
  Rng rng_obs = rng.fork(1);

  ScenarioConfig scenario;
  scenario.difficulty = difficulty;
  scenario.seed = seed;
  scenario.waypoints = random_waypoints(rng_path, cfg);
  const QpmiPath path = QpmiPath::build(scenario.waypoints);
  const double length = path.total_length();

  const double r_min = cfg.get_double("env.obstacle_radius_min");
  const double r_max = cfg.get_double("env.obstacle_radius_max");
  const double off_min = cfg.get_double("env.offpath_offset_min");
  const double off_max = cfg.get_double("env.offpath_offset_max");
  const double safety = cfg.get_double("env.safety_radius");

  const auto add_on_path = [&](double s) {
    Obstacle obs{path.position(s), rng_obs.uniform(r_min, r_max)};
    for (int tries = 0; tries < 100 && !clears_path_ends(path, obs, safety); ++tries) {
      obs.radius = std::max(r_min, obs.radius * 0.8);
    }
    scenario.obstacles.push_back(obs);
  };

  if (difficulty >= Difficulty::kIntermediate) add_on_path(length / 2.0);
  if (difficulty >= Difficulty::kProficient) {
    add_on_path(length / 2.0 - length / 12.0);
    add_on_path(length / 2.0 + length / 12.0);
  }
  if (difficulty >= Difficulty::kAdvanced) {
    for (int k = 0; k < 5; ++k) {
      Obstacle obs;
      for (int tries = 0; tries < 100; ++tries) {
        const double s = rng_obs.uniform(length / 3.0 + r_max, 2.0 * length / 3.0 - r_max);
        const auto [n1, n2] = normal_plane(path, s);
        const double angle = rng_obs.uniform(0.0, 2.0 * M_PI);
        const double offset = rng_obs.uniform(off_min, off_max);
        obs.center =
            path.position(s) + offset * (std::cos(angle) * n1 + std::sin(angle) * n2);
        obs.radius = rng_obs.uniform(r_min, r_max);
        if (clears_path_ends(path, obs, safety)) break;
      }
      scenario.obstacles.push_back(obs);
    }
  }
  scenario.current_enabled = (difficulty == Difficulty::kExpert);
  return scenario;
}

Eigen::VectorXd build_observation(const VehicleState& state, const Vector6d& current_body,
                                  double chi_err, double upsilon_err,
                                  const Eigen::MatrixXd& pooled) {
  Eigen::VectorXd obs(Environment::kObservationDim);
  const Eigen::Vector3d rel = state.linear_velocity - current_body.head<3>();
  // Normalizers: empirical or true maxima per signal.
  obs[0] = rel.x() / 2.0;
  obs[1] = rel.y() / 0.3;
  obs[2] = rel.z() / 0.3;
  obs[3] = state.attitude.x() / M_PI;
  obs[4] = state.attitude.y() / M_PI;
  obs[5] = state.attitude.z() / M_PI;
  obs[6] = state.angular_velocity.x() / 1.2;
  obs[7] = state.angular_velocity.y() / 0.4;
  obs[8] = state.angular_velocity.z() / 0.4;
  obs[9] = chi_err / M_PI;
  obs[10] = upsilon_err / M_PI;
  obs[11] = current_body[0] / 1.0;
  obs[12] = current_body[1] / 1.0;
  obs[13] = current_body[2] / 1.0;
  int k = 14;
  for (int r = 0; r < pooled.rows(); ++r) {
    for (int c = 0; c < pooled.cols(); ++c) obs[k++] = pooled(r, c);
  }
  return obs.cwiseMax(-1.0).cwiseMin(1.0);
}

Environment::Environment(ScenarioConfig scenario, const Config& cfg)
    : scenario_(std::move(scenario)),
      hydro_(HydroParams::from_config(cfg)),
      sonar_cfg_(SonarConfig::from_config(cfg)),
      reward_cfg_(RewardConfig::from_config(cfg)),
      filter_(FilterConfig::from_config(cfg)),
      pi_(PiController::from_config(cfg)),
      path_(QpmiPath::build(scenario_.waypoints, cfg.get_double("path.arc_resolution"))),
      rng_(scenario_.seed) {
  dt_ = cfg.get_double("env.dt");
  lookahead_ = cfg.get_double("guidance.lookahead");
  acceptance_radius_ = cfg.get_double("env.acceptance_radius");
  safety_radius_ = cfg.get_double("env.safety_radius");
  sonar_every_ = std::max(1, static_cast<int>(std::lround(sonar_cfg_.update_period / dt_)));
  max_steps_ = static_cast<int>(std::ceil(cfg.get_double("env.timeout_factor") *
                                          path_.total_length() / (pi_.setpoint * dt_)));
  current_.mean_reversion = cfg.get_double("current.mu");
  current_.noise_std = cfg.get_double("current.noise_std");
  current_.min_speed = cfg.get_double("current.min_speed");
  current_.max_speed = cfg.get_double("current.max_speed");
}

Eigen::VectorXd Environment::reset() {
  rng_ = Rng(scenario_.seed ^ 0xE9150C0DE);
  const PathPoint start = path_.point_at(0.0);
  state_ = VehicleState{};
  state_.position = start.position;
  state_.attitude = {0.0, start.elevation, start.azimuth};
  state_.linear_velocity = {pi_.setpoint, 0.0, 0.0};
  actuators_ = ActuatorState{};
  pi_.integral = 0.0;
  if (scenario_.current_enabled) {
    current_.intensity = rng_.uniform(current_.min_speed, current_.max_speed);
    current_.angle_of_attack = rng_.uniform(-M_PI, M_PI);
    current_.sideslip = rng_.uniform(-M_PI, M_PI);
  } else {
    current_.intensity = 0.0;
    current_.angle_of_attack = 0.0;
    current_.sideslip = 0.0;
  }
  sonar_image_ = scan(state_, scenario_.obstacles, sonar_cfg_);
  s_hint_ = 0.0;
  steps_ = 0;
  tracking_error_sum_ = 0.0;
  done_ = false;
  outcome_ = EpisodeOutcome{};
  trajectory_.clear();

  const PathPoint pp = path_.closest_point_near(state_.position, s_hint_);
  const TrackingError err = tracking_errors(pp, state_.position);
  cross_track_ = err.cross_track;
  vertical_track_ = err.vertical_track;
  const auto [chi_d, ups_d] = guidance_angles(err, pp, lookahead_);
  chi_err_ = wrap_angle(chi_d - start.azimuth);
  upsilon_err_ = wrap_angle(ups_d - start.elevation);
  return observe();
}

Eigen::VectorXd Environment::observe() {
  const Vector6d nu_c = scenario_.current_enabled
                            ? current_velocity_body(current_, state_.attitude)
                            : Vector6d::Zero();
  return build_observation(state_, nu_c, chi_err_, upsilon_err_, min_pool(sonar_image_));
}

Environment::StepResult Environment::step(const Eigen::Vector2d& action) {
  if (done_) throw std::logic_error("step() called on a finished episode");

  const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  actuators_.rudder = low_pass(actuators_.rudder, a[0] * hydro_.delta_max, filter_);
  actuators_.elevator = low_pass(actuators_.elevator, a[1] * hydro_.delta_max, filter_);
  actuators_.propeller_speed = pi_.update(state_.linear_velocity.x(), dt_);

  EpisodeStatus fault = EpisodeStatus::kRunning;
  try {
    state_ = auv::step(state_, actuators_, current_, hydro_, dt_);
  } catch (const SingularAttitudeError&) {
    fault = EpisodeStatus::kFault;
  } catch (const SimulationDivergedError&) {
    fault = EpisodeStatus::kFault;
  }
  if (scenario_.current_enabled) {
    const double w = current_.noise_std * rng_.normal() / std::sqrt(dt_);
    current_ = current_step(current_, dt_, w);
  }
  ++steps_;
  if (fault == EpisodeStatus::kRunning && steps_ % sonar_every_ == 0) {
    sonar_image_ = scan(state_, scenario_.obstacles, sonar_cfg_);
  }

  StepResult result;
  if (fault != EpisodeStatus::kRunning) {
    done_ = true;
    outcome_ = {EpisodeStatus::kFault, steps_,
                steps_ > 0 ? tracking_error_sum_ / steps_ : 0.0};
    result.observation = observe();
    result.reward = 0.0;
    result.done = true;
    result.status = EpisodeStatus::kFault;
    return result;
  }

  const PathPoint pp = path_.closest_point_near(state_.position, s_hint_);
  s_hint_ = pp.arc_length;
  const TrackingError err = tracking_errors(pp, state_.position);
  cross_track_ = err.cross_track;
  vertical_track_ = err.vertical_track;
  tracking_error_sum_ += std::hypot(err.cross_track, err.vertical_track);
  const auto [chi_d, ups_d] = guidance_angles(err, pp, lookahead_);

  // Course and climb angle of the ground velocity; fall back to the attitude
  // when nearly at rest.
  const Eigen::Vector3d v_ned = rotation_body_to_ned(state_.attitude) * state_.linear_velocity;
  double chi, ups;
  if (v_ned.norm() > 0.05) {
    chi = std::atan2(v_ned.y(), v_ned.x());
    ups = std::atan2(-v_ned.z(), std::hypot(v_ned.x(), v_ned.y()));
  } else {
    chi = state_.attitude.z();
    ups = state_.attitude.y();
  }
  chi_err_ = wrap_angle(chi_d - chi);
  upsilon_err_ = wrap_angle(ups_d - ups);

  result.reward = total_reward(chi_err_, upsilon_err_, sonar_image_, sonar_cfg_,
                               state_.attitude.x(), state_.angular_velocity.x(),
                               actuators_.rudder, actuators_.elevator, reward_cfg_);

  check_termination();
  result.observation = observe();
  result.done = done_;
  result.status = done_ ? outcome_.status : EpisodeStatus::kRunning;

  if (recording_) {
    StepRecord rec;
    rec.time = steps_ * dt_;
    rec.state = state_;
    rec.action = a;
    rec.rudder = actuators_.rudder;
    rec.elevator = actuators_.elevator;
    rec.propeller = actuators_.propeller_speed;
    rec.cross_track = err.cross_track;
    rec.vertical_track = err.vertical_track;
    rec.chi_err = chi_err_;
    rec.upsilon_err = upsilon_err_;
    rec.reward = result.reward;
    rec.reward_pf_part = reward_pf(chi_err_, upsilon_err_, reward_cfg_);
    rec.reward_oa_part = reward_oa(sonar_image_, sonar_cfg_, reward_cfg_);
    trajectory_.push_back(rec);
  }
  return result;
}

void Environment::check_termination() {
  const Eigen::Vector3d goal = scenario_.waypoints.points.back();
  bool collision = false;
  for (const Obstacle& obs : scenario_.obstacles) {
    if ((state_.position - obs.center).norm() - obs.radius < safety_radius_) {
      collision = true;
      break;
    }
  }
  EpisodeStatus status = EpisodeStatus::kRunning;
  if (collision) {
    status = EpisodeStatus::kCollision;
  } else if ((state_.position - goal).norm() < acceptance_radius_) {
    status = EpisodeStatus::kSuccess;
  } else if (steps_ >= max_steps_) {
    status = EpisodeStatus::kTimeout;
  }
  if (status != EpisodeStatus::kRunning) {
    done_ = true;
    outcome_ = {status, steps_, steps_ > 0 ? tracking_error_sum_ / steps_ : 0.0};
  }
}

void Environment::save_trajectory_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file: " + path);
  out << "time,x,y,z,roll,pitch,yaw,u,v,w,p,q,r,action_rudder,action_elevator,"
         "rudder,elevator,propeller,cross_track,vertical_track,chi_err,upsilon_err,"
         "reward,reward_pf,reward_oa\n";
  out.precision(10);
  for (const StepRecord& r : trajectory_) {
    out << r.time << "," << r.state.position.x() << "," << r.state.position.y() << ","
        << r.state.position.z() << "," << r.state.attitude.x() << "," << r.state.attitude.y()
        << "," << r.state.attitude.z() << "," << r.state.linear_velocity.x() << ","
        << r.state.linear_velocity.y() << "," << r.state.linear_velocity.z() << ","
        << r.state.angular_velocity.x() << "," << r.state.angular_velocity.y() << ","
        << r.state.angular_velocity.z() << "," << r.action.x() << "," << r.action.y() << ","
        << r.rudder << "," << r.elevator << "," << r.propeller << "," << r.cross_track << ","
        << r.vertical_track << "," << r.chi_err << "," << r.upsilon_err << "," << r.reward << ","
        << r.reward_pf_part << "," << r.reward_oa_part << "\n";
  }
}

}  // namespace auv
