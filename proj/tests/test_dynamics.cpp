#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auv/dynamics.hpp"
#include "auv/rng.hpp"

using namespace auv;

TEST_CASE("body-to-NED rotation is orthonormal with determinant 1") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector3d att(rng.uniform(-M_PI, M_PI), rng.uniform(-1.4, 1.4),
                              rng.uniform(-M_PI, M_PI));
    const Eigen::Matrix3d R = rotation_body_to_ned(att);
    CHECK((R * R.transpose() - Eigen::Matrix3d::Identity()).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rotation at canonical attitudes matches hand-computed matrices") {
  // Identity at zero attitude.
  CHECK((rotation_body_to_ned(Eigen::Vector3d::Zero()) - Eigen::Matrix3d::Identity())
            .lpNorm<Eigen::Infinity>() < 1e-15);

  // Pure roll of pi/2: body y maps to NED z, body z to -y.
  Eigen::Matrix3d expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK((rotation_body_to_ned({M_PI / 2, 0, 0}) - expected).lpNorm<Eigen::Infinity>() < 1e-12);

  // Pure yaw of pi/2: body x maps to NED y.
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((rotation_body_to_ned({0, 0, M_PI / 2}) - expected).lpNorm<Eigen::Infinity>() < 1e-12);

  // Pure pitch of pi/2: body x maps to NED -z (nose straight up).
  expected << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  CHECK((rotation_body_to_ned({0, M_PI / 2, 0}) - expected).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("euler-rate transform matches closed forms and throws at the singularity") {
  // At zero attitude T is the identity.
  CHECK((euler_rate_transform(Eigen::Vector3d::Zero()) - Eigen::Matrix3d::Identity())
            .lpNorm<Eigen::Infinity>() < 1e-15);

  // Generic attitude against the textbook closed form.
  const Eigen::Vector3d att(0.3, -0.5, 1.1);
  const double sphi = std::sin(att[0]), cphi = std::cos(att[0]);
  const double tth = std::tan(att[1]), cth = std::cos(att[1]);
  Eigen::Matrix3d expected;
  expected << 1, sphi * tth, cphi * tth, 0, cphi, -sphi, 0, sphi / cth, cphi / cth;
  CHECK((euler_rate_transform(att) - expected).lpNorm<Eigen::Infinity>() < 1e-14);

  CHECK_THROWS_AS(euler_rate_transform({0, M_PI / 2, 0}), SingularAttitudeError);
  CHECK_THROWS_AS(euler_rate_transform({0, -M_PI / 2 + 1e-9, 0}), SingularAttitudeError);
  CHECK_NOTHROW(euler_rate_transform({0, M_PI / 2 - 0.01, 0}));
}

TEST_CASE("kinematics derivative is the block product [R v; T w]") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    VehicleState s;
    s.attitude = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-3.0, 3.0)};
    s.linear_velocity = {rng.normal(), rng.normal(), rng.normal()};
    s.angular_velocity = {rng.normal(), rng.normal(), rng.normal()};
    const Vector6d d = kinematics_derivative(s);
    const Eigen::Vector3d pos_dot = rotation_body_to_ned(s.attitude) * s.linear_velocity;
    const Eigen::Vector3d att_dot = euler_rate_transform(s.attitude) * s.angular_velocity;
    CHECK((d.head<3>() - pos_dot).norm() < 1e-13);
    CHECK((d.tail<3>() - att_dot).norm() < 1e-13);
  }
}

TEST_CASE("coriolis matrix is skew-symmetric, hence workless") {
  HydroParams params;
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d omega(rng.normal(), rng.normal(), rng.normal());
    const Matrix6d C = coriolis_matrix(omega, params);
    CHECK((C + C.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
    Vector6d nu;
    for (int i = 0; i < 6; ++i) nu[i] = rng.normal();
    CHECK(std::abs(nu.dot(C * nu)) < 1e-10);
  }
  // Independent of linear velocity by construction: zero rotation gives zero C.
  CHECK(coriolis_matrix(Eigen::Vector3d::Zero(), params).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("damping is positive definite over operating velocities") {
  HydroParams params;
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    Vector6d nu;
    for (int i = 0; i < 6; ++i) nu[i] = rng.uniform(-2.0, 2.0);
    const Matrix6d D = damping_matrix(nu, params);
    CHECK(nu.dot(D * nu) >= 0.0);
    // Diagonal model: each entry is d_lin + d_quad |nu_i|.
    for (int i = 0; i < 6; ++i) {
      CHECK(D(i, i) ==
            doctest::Approx(params.d_lin[i] + params.d_quad[i] * std::abs(nu[i])).epsilon(1e-14));
    }
  }
}

TEST_CASE("restoring forces vanish at level trim and right the vehicle") {
  HydroParams params;
  const Vector6d g0 = restoring_forces(Eigen::Vector3d::Zero(), params);
  // Level attitude: only the net-buoyancy heave term remains. g enters the
  // equations of motion with a minus sign, so a buoyant vehicle (B > W) needs
  // g_heave = +(B - W) to accelerate upwards (negative w in NED).
  CHECK(g0[0] == 0.0);
  CHECK(g0[1] == 0.0);
  CHECK(g0[2] == doctest::Approx(params.net_buoyancy));
  CHECK(g0.tail<3>().lpNorm<Eigen::Infinity>() == 0.0);

  // A small positive roll must produce a restoring (negative) roll moment
  // contribution in the equations of motion: g enters as -g, so g_roll > 0.
  const Vector6d g_roll = restoring_forces({0.2, 0, 0}, params);
  CHECK(g_roll[3] > 0.0);
  // Same for pitch.
  const Vector6d g_pitch = restoring_forces({0, 0.2, 0}, params);
  CHECK(g_pitch[4] > 0.0);
}

TEST_CASE("unforced motion decays: kinetic energy shrinks without inputs") {
  HydroParams params;
  params.restoring_enabled = false;  // isolate damping + Coriolis
  VehicleState s;
  s.linear_velocity = {1.5, 0.4, -0.3};
  s.angular_velocity = {0.2, -0.1, 0.3};
  ActuatorState act;  // all zero
  CurrentState current;  // zero intensity
  const Matrix6d M = params.mass_matrix();
  double energy = 0.5 * s.velocity().dot(M * s.velocity());
  for (int i = 0; i < 600; ++i) {
    s = step(s, act, current, params, 0.1);
    const double next = 0.5 * s.velocity().dot(M * s.velocity());
    CHECK(next <= energy + 1e-10);
    energy = next;
  }
  CHECK(energy < 1e-3);
}

TEST_CASE("straight-line trim speed stays below 2 m/s at full throttle") {
  HydroParams params;
  VehicleState s;
  ActuatorState act;
  act.propeller_speed = params.prop_max;
  CurrentState current;
  for (int i = 0; i < 600; ++i) s = step(s, act, current, params, 0.1);
  CHECK(s.linear_velocity[0] > 1.5);
  CHECK(s.linear_velocity[0] < 2.0);
  // Steady state: thrust balances surge drag.
  const double u = s.linear_velocity[0];
  const double thrust = params.thrust_coeff * params.prop_max * params.prop_max;
  const double drag = (params.d_lin[0] + params.d_quad[0] * u) * u;
  CHECK(thrust == doctest::Approx(drag).epsilon(1e-2));
}

TEST_CASE("positive rudder yaws the nose to negative psi, positive elevator pitches up") {
  HydroParams params;
  VehicleState s;
  s.linear_velocity[0] = 1.5;
  CurrentState current;
  ActuatorState act;
  act.propeller_speed = 40.0;

  act.rudder = 0.3;
  VehicleState sr = s;
  for (int i = 0; i < 30; ++i) sr = step(sr, act, current, params, 0.1);
  CHECK(sr.attitude[2] < -0.01);

  act.rudder = 0.0;
  act.elevator = 0.3;
  VehicleState se = s;
  for (int i = 0; i < 30; ++i) se = step(se, act, current, params, 0.1);
  CHECK(se.attitude[1] > 0.01);
}

TEST_CASE("rk4 at dt 0.1 agrees with fine euler integration") {
  HydroParams params;
  VehicleState rk = {};
  rk.linear_velocity = {1.2, 0.1, -0.05};
  rk.angular_velocity = {0.05, 0.1, -0.2};
  rk.attitude = {0.05, -0.1, 0.4};
  ActuatorState act;
  act.propeller_speed = 30.0;
  act.rudder = 0.1;
  act.elevator = -0.05;
  CurrentState current;

  VehicleState euler = rk;
  const double dt = 0.1;
  const int substeps = 1000;
  for (int outer = 0; outer < 50; ++outer) {
    rk = step(rk, act, current, params, dt);
    for (int i = 0; i < substeps; ++i) {
      const Vector6d eta_dot = kinematics_derivative(euler);
      const Vector6d nu_dot = kinetics_derivative(euler, act, current, params);
      const double h = dt / substeps;
      euler.position += h * eta_dot.head<3>();
      euler.attitude += h * eta_dot.tail<3>();
      euler.linear_velocity += h * nu_dot.head<3>();
      euler.angular_velocity += h * nu_dot.tail<3>();
    }
  }
  CHECK((rk.position - euler.position).norm() < 1e-3);
  CHECK((rk.linear_velocity - euler.linear_velocity).norm() < 1e-3);
  CHECK((rk.angular_velocity - euler.angular_velocity).norm() < 1e-3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(wrap_angle(rk.attitude[k] - euler.attitude[k])) < 1e-3);
  }
}

TEST_CASE("current intensity stays in its clamp band over a long run") {
  CurrentState c;
  c.intensity = 0.75;
  Rng rng(5);
  const double dt = 0.1;
  for (int i = 0; i < 1000000; ++i) {
    c = current_step(c, dt, c.noise_std * rng.normal() / std::sqrt(dt));
    REQUIRE(c.intensity >= c.min_speed);
    REQUIRE(c.intensity <= c.max_speed);
  }
}

TEST_CASE("noise-free current decays towards zero until the clamp floor") {
  CurrentState c;
  c.intensity = 1.0;
  double prev = c.intensity;
  for (int i = 0; i < 2000; ++i) {
    c = current_step(c, 0.1, 0.0);
    CHECK(c.intensity <= prev + 1e-15);
    prev = c.intensity;
  }
  CHECK(c.intensity == doctest::Approx(c.min_speed));
}

TEST_CASE("body-frame current velocity has the commanded magnitude and no rotation") {
  CurrentState c;
  c.intensity = 0.8;
  c.sideslip = 0.4;
  c.angle_of_attack = -0.3;
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector3d att(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3));
    const Vector6d nu_c = current_velocity_body(c, att);
    CHECK(nu_c.head<3>().norm() == doctest::Approx(c.intensity).epsilon(1e-12));
    CHECK(nu_c.tail<3>().lpNorm<Eigen::Infinity>() == 0.0);
  }
  // At zero attitude the body frame coincides with NED.
  const Vector6d nu_c = current_velocity_body(c, Eigen::Vector3d::Zero());
  const double a = c.angle_of_attack, b = c.sideslip;
  CHECK(nu_c[0] == doctest::Approx(c.intensity * std::cos(a) * std::cos(b)).epsilon(1e-12));
  CHECK(nu_c[1] == doctest::Approx(c.intensity * std::sin(b)).epsilon(1e-12));
  CHECK(nu_c[2] == doctest::Approx(c.intensity * std::sin(a) * std::cos(b)).epsilon(1e-12));
}

TEST_CASE("step throws on a singular pitch and preserves finite state otherwise") {
  HydroParams params;
  VehicleState s;
  s.attitude[1] = M_PI / 2 - 1e-5;
  ActuatorState act;
  CurrentState current;
  CHECK_THROWS_AS(step(s, act, current, params, 0.1), SingularAttitudeError);
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
  CHECK(wrap_angle(10 * M_PI + 0.3) == doctest::Approx(0.3));
  CHECK(wrap_angle(-7 * M_PI - 0.3) == doctest::Approx(M_PI - 0.3));
}
