#include "auv/dynamics.hpp"

#include <cmath>

namespace auv {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

HydroParams HydroParams::from_config(const Config& cfg) {
  HydroParams p;
  p.mass = cfg.get_double("dynamics.mass");
  p.inertia = {cfg.get_double("dynamics.inertia_x"), cfg.get_double("dynamics.inertia_y"),
               cfg.get_double("dynamics.inertia_z")};
  const char* am[] = {"u", "v", "w", "p", "q", "r"};
  for (int i = 0; i < 6; ++i) {
    p.added_mass[i] = cfg.get_double(std::string("dynamics.added_mass_") + am[i]);
    p.d_lin[i] = cfg.get_double(std::string("dynamics.dlin_") + am[i]);
    p.d_quad[i] = cfg.get_double(std::string("dynamics.dquad_") + am[i]);
  }
  p.net_buoyancy = cfg.get_double("dynamics.net_buoyancy");
  p.cog_z = cfg.get_double("dynamics.cog_z");
  p.thrust_coeff = cfg.get_double("dynamics.thrust_coeff");
  p.prop_max = cfg.get_double("dynamics.prop_max");
  p.fin_lift_coeff = cfg.get_double("dynamics.fin_lift_coeff");
  p.fin_arm = cfg.get_double("dynamics.fin_arm");
  p.delta_max = cfg.get_double("dynamics.delta_max_deg") * M_PI / 180.0;
  p.pitch_singularity_margin = cfg.get_double("dynamics.pitch_singularity_margin");
  return p;
}

Matrix6d HydroParams::mass_matrix() const {
  Vector6d diag;
  diag << mass + added_mass[0], mass + added_mass[1], mass + added_mass[2],
      inertia[0] + added_mass[3], inertia[1] + added_mass[4], inertia[2] + added_mass[5];
  return diag.asDiagonal();
}

Matrix6d HydroParams::mass_matrix_inverse() const {
  return mass_matrix().diagonal().cwiseInverse().asDiagonal();
}

Eigen::Matrix3d rotation_body_to_ned(const Eigen::Vector3d& attitude) {
  const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
  const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
  const double cpsi = std::cos(attitude.z()), spsi = std::sin(attitude.z());
  Eigen::Matrix3d r;
  // z-y-x convention: R = Rz(psi) Ry(theta) Rx(phi)
  r << cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth,
      spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi,
      -sth, cth * sphi, cth * cphi;
  return r;
}

Eigen::Matrix3d euler_rate_transform(const Eigen::Vector3d& attitude, double margin) {
  const double cth = std::cos(attitude.y());
  if (std::abs(cth) < margin) {
    throw SingularAttitudeError("Euler-rate transform singular: |cos(pitch)| < margin");
  }
  const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
  const double tth = std::tan(attitude.y());
  Eigen::Matrix3d t;
  t << 1, sphi * tth, cphi * tth,
      0, cphi, -sphi,
      0, sphi / cth, cphi / cth;
  return t;
}

Vector6d kinematics_derivative(const VehicleState& state, double margin) {
  Vector6d d;
  d.head<3>() = rotation_body_to_ned(state.attitude) * state.linear_velocity;
  d.tail<3>() = euler_rate_transform(state.attitude, margin) * state.angular_velocity;
  return d;
}

Matrix6d coriolis_matrix(const Eigen::Vector3d& omega, const HydroParams& params) {
  // Linear-velocity-independent parametrization; valid for subtracting an
  // irrotational constant-NED current. Skew-symmetrized so C is workless.
  const Eigen::Matrix3d m_lin =
      (Eigen::Vector3d(params.mass + params.added_mass[0], params.mass + params.added_mass[1],
                       params.mass + params.added_mass[2]))
          .asDiagonal();
  const Eigen::Vector3d i_ang(params.inertia[0] + params.added_mass[3],
                              params.inertia[1] + params.added_mass[4],
                              params.inertia[2] + params.added_mass[5]);
  Matrix6d c = Matrix6d::Zero();
  const Eigen::Matrix3d top = skew(omega) * m_lin;
  c.topLeftCorner<3, 3>() = 0.5 * (top - top.transpose());
  c.bottomRightCorner<3, 3>() = -skew(i_ang.cwiseProduct(omega));
  return c;
}

Matrix6d damping_matrix(const Vector6d& nu, const HydroParams& params) {
  const Vector6d diag = params.d_lin + params.d_quad.cwiseProduct(nu.cwiseAbs());
  return diag.asDiagonal();
}

Vector6d restoring_forces(const Eigen::Vector3d& attitude, const HydroParams& params) {
  if (!params.restoring_enabled) return Vector6d::Zero();
  const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
  const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
  const double wb = -params.net_buoyancy;  // W - B
  const double zgw = params.cog_z * params.weight();
  Vector6d g;
  g << wb * sth, -wb * cth * sphi, -wb * cth * cphi,
      zgw * cth * sphi, zgw * sth, 0.0;
  return g;
}

Vector6d control_forces(const ActuatorState& act, double relative_surge,
                        const HydroParams& params) {
  const double n = std::clamp(act.propeller_speed, 0.0, params.prop_max);
  const double dr = std::clamp(act.rudder, -params.delta_max, params.delta_max);
  const double ds = std::clamp(act.elevator, -params.delta_max, params.delta_max);
  const double thrust = params.thrust_coeff * n * n;
  const double q_fin = params.fin_lift_coeff * relative_surge * std::abs(relative_surge);
  const double fy = q_fin * dr;  // rudder: sway force at the stern fin
  const double fz = q_fin * ds;  // elevator: heave force at the stern fin
  Vector6d tau;
  tau << thrust, fy, fz, 0.0, -params.fin_arm * fz, params.fin_arm * fy;
  return tau;
}

Vector6d kinetics_derivative(const VehicleState& state, const ActuatorState& act,
                             const CurrentState& current, const HydroParams& params) {
  const Vector6d nu_c = current_velocity_body(current, state.attitude);
  const Vector6d nu_r = state.velocity() - nu_c;
  const Vector6d tau = control_forces(act, nu_r[0], params);
  Vector6d rhs = tau - damping_matrix(nu_r, params) * nu_r -
                 restoring_forces(state.attitude, params);
  if (params.coriolis_enabled) {
    rhs -= coriolis_matrix(state.angular_velocity, params) * nu_r;
  }
  const Vector6d acc = params.mass_matrix_inverse() * rhs;
  if (!acc.allFinite()) {
    throw SimulationDivergedError("kinetics produced non-finite acceleration");
  }
  return acc;
}

namespace {

// Combined 12-state derivative for the integrator: [eta_dot; nu_r_dot].
// The current contribution to eta_dot is added back through nu = nu_r + nu_c.
Eigen::Matrix<double, 12, 1> full_derivative(const VehicleState& s, const ActuatorState& act,
                                             const CurrentState& current,
                                             const HydroParams& params) {
  Eigen::Matrix<double, 12, 1> d;
  d.head<6>() = kinematics_derivative(s, params.pitch_singularity_margin);
  d.tail<6>() = kinetics_derivative(s, act, current, params);
  return d;
}

VehicleState advance(const VehicleState& s, const Eigen::Matrix<double, 12, 1>& d, double dt) {
  VehicleState n = s;
  n.position += dt * d.segment<3>(0);
  n.attitude += dt * d.segment<3>(3);
  n.linear_velocity += dt * d.segment<3>(6);
  n.angular_velocity += dt * d.segment<3>(9);
  return n;
}

}  // namespace

VehicleState step(const VehicleState& state, const ActuatorState& act,
                  const CurrentState& current, const HydroParams& params, double dt) {
  const auto k1 = full_derivative(state, act, current, params);
  const auto k2 = full_derivative(advance(state, k1, dt / 2), act, current, params);
  const auto k3 = full_derivative(advance(state, k2, dt / 2), act, current, params);
  const auto k4 = full_derivative(advance(state, k3, dt), act, current, params);
  VehicleState next = advance(state, (k1 + 2 * k2 + 2 * k3 + k4) / 6.0, dt);
  for (int i = 0; i < 3; ++i) next.attitude[i] = wrap_angle(next.attitude[i]);
  if (!next.finite()) throw SimulationDivergedError("state diverged during step");
  return next;
}

CurrentState current_step(const CurrentState& current, double dt, double noise_sample) {
  CurrentState next = current;
  next.intensity += dt * (-current.mean_reversion * current.intensity + noise_sample);
  next.intensity = std::clamp(next.intensity, current.min_speed, current.max_speed);
  return next;
}

Vector6d current_velocity_body(const CurrentState& current, const Eigen::Vector3d& attitude) {
  const double ca = std::cos(current.angle_of_attack), sa = std::sin(current.angle_of_attack);
  const double cb = std::cos(current.sideslip), sb = std::sin(current.sideslip);
  const Eigen::Vector3d v_ned = current.intensity * Eigen::Vector3d(ca * cb, sb, sa * cb);
  Vector6d nu_c = Vector6d::Zero();
  nu_c.head<3>() = rotation_body_to_ned(attitude).transpose() * v_ned;
  return nu_c;
}

}  // namespace auv
