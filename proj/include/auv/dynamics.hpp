#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "auv/config.hpp"

namespace auv {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Thrown when the Euler-rate transform approaches its pitch singularity.
struct SingularAttitudeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when integration produces non-finite state.
struct SimulationDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pose and body-frame velocity of the vehicle.
/// position (m, NED), attitude (rad: roll, pitch, yaw),
/// linear_velocity (m/s, body: u, v, w), angular_velocity (rad/s, body: p, q, r).
struct VehicleState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d attitude = Eigen::Vector3d::Zero();
  Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();

  Vector6d velocity() const {
    Vector6d nu;
    nu << linear_velocity, angular_velocity;
    return nu;
  }

  bool finite() const {
    return position.allFinite() && attitude.allFinite() && linear_velocity.allFinite() &&
           angular_velocity.allFinite();
  }
};

/// Actuator set-points after saturation and filtering.
/// rudder/elevator hold the current filtered fin angles (rad); they double as
/// the filter state for the next step. propeller_speed in rev/s, >= 0.
struct ActuatorState {
  double propeller_speed = 0.0;
  double rudder = 0.0;
  double elevator = 0.0;
};

/// Gauss-Markov ocean current: intensity plus a fixed per-episode direction.
struct CurrentState {
  double intensity = 0.0;       // V_c, m/s
  double sideslip = 0.0;        // beta_c, rad
  double angle_of_attack = 0.0; // alpha_c, rad
  double mean_reversion = 0.05; // mu, 1/s
  double noise_std = 0.1;       // m/s per sqrt(s)
  double min_speed = 0.5;       // clamp band, m/s
  double max_speed = 1.0;
};

/// Diagonal spheroid hydrodynamic model plus the actuator force map.
struct HydroParams {
  double mass = 18.0;
  Eigen::Vector3d inertia{0.04, 1.1, 1.1};
  Vector6d added_mass = (Vector6d() << 1.0, 16.0, 16.0, 0.01, 1.0, 1.0).finished();
  Vector6d d_lin = (Vector6d() << 2.4, 23.0, 23.0, 0.3, 9.7, 9.7).finished();
  Vector6d d_quad = (Vector6d() << 2.4, 80.0, 80.0, 0.01, 9.1, 9.1).finished();
  double net_buoyancy = 0.5;  // B - W, N (> 0: floats up on power loss)
  double cog_z = 0.01;        // CG below CB, m
  double thrust_coeff = 0.005;
  double prop_max = 53.0;
  double fin_lift_coeff = 4.0;
  double fin_arm = -0.55;
  double delta_max = 30.0 * M_PI / 180.0;
  double pitch_singularity_margin = 1e-3;
  bool restoring_enabled = true;
  bool coriolis_enabled = true;

  static HydroParams from_config(const Config& cfg);

  /// Combined rigid-body + added mass matrix (diagonal, SPD).
  Matrix6d mass_matrix() const;
  Matrix6d mass_matrix_inverse() const;

  /// Weight in N.
  double weight() const { return mass * 9.81; }
};

/// Body-to-NED rotation, z-y-x convention.
Eigen::Matrix3d rotation_body_to_ned(const Eigen::Vector3d& attitude);

/// Euler-rate transform T(attitude) mapping body rates to Euler-angle rates.
/// Throws SingularAttitudeError when |cos(pitch)| < margin.
Eigen::Matrix3d euler_rate_transform(const Eigen::Vector3d& attitude, double margin = 1e-3);

/// Pose derivative [R v; T w].
Vector6d kinematics_derivative(const VehicleState& state, double margin = 1e-3);

/// Coriolis matrix, parametrized by angular velocity only (skew-symmetric).
Matrix6d coriolis_matrix(const Eigen::Vector3d& omega, const HydroParams& params);

/// Damping matrix D(nu) = D_lin + D_quad * diag(|nu|), evaluated at nu.
Matrix6d damping_matrix(const Vector6d& nu, const HydroParams& params);

/// Restoring force/moment vector g(eta) for a slightly buoyant vehicle with
/// CG below CB.
Vector6d restoring_forces(const Eigen::Vector3d& attitude, const HydroParams& params);

/// Control force map tau(propeller, rudder, elevator) at relative surge u_r.
Vector6d control_forces(const ActuatorState& act, double relative_surge,
                        const HydroParams& params);

/// Relative-velocity acceleration M^-1 (tau - C nu_r - D nu_r - g).
/// Throws SimulationDivergedError on non-finite result.
Vector6d kinetics_derivative(const VehicleState& state, const ActuatorState& act,
                             const CurrentState& current, const HydroParams& params);

/// Advance the vehicle one control step with fixed-step RK4.
VehicleState step(const VehicleState& state, const ActuatorState& act,
                  const CurrentState& current, const HydroParams& params, double dt);

/// Advance the current intensity one step: Euler update of the Gauss-Markov
/// process, clamped to the [min_speed, max_speed] band. Direction unchanged.
CurrentState current_step(const CurrentState& current, double dt, double noise_sample);

/// Current velocity in the body frame: [R^T V_c dir; 0 0 0] (irrotational).
Vector6d current_velocity_body(const CurrentState& current, const Eigen::Vector3d& attitude);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace auv
