#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auv/control.hpp"
#include "auv/dynamics.hpp"

using namespace auv;

TEST_CASE("filter gain comes out of the documented formula") {
  FilterConfig f;  // T_f = 0.2, h = 0.1
  CHECK(f.alpha() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  f.time_constant = 0.0;
  CHECK(f.alpha() == 1.0);  // degenerates to a passthrough
}

TEST_CASE("zero time constant passes the command through unchanged") {
  FilterConfig f;
  f.time_constant = 0.0;
  CHECK(low_pass(0.7, -0.2, f) == doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("step response converges geometrically to the command") {
  FilterConfig f;
  const double a = f.alpha();
  double y = 0.0;
  const double target = 0.5;
  for (int k = 1; k <= 40; ++k) {
    y = low_pass(y, target, f);
    // Closed form of the first-order recursion for a constant input.
    const double expected = target * (1.0 - std::pow(1.0 - a, k));
    CHECK(y == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK(std::abs(y - target) < 1e-5);
}

TEST_CASE("the filter attenuates a step-rate alternating command") {
  FilterConfig f;
  double y = 0.0;
  double peak = 0.0;
  for (int k = 0; k < 200; ++k) {
    y = low_pass(y, (k % 2 == 0) ? 1.0 : -1.0, f);
    if (k > 100) peak = std::max(peak, std::abs(y));
  }
  // Nyquist-rate input: steady-state gain a / (2 - a) = 0.2.
  CHECK(peak == doctest::Approx(f.alpha() / (2.0 - f.alpha())).epsilon(1e-6));
}

TEST_CASE("pi controller reaches cruise speed on the full vehicle") {
  HydroParams params;
  PiController pi;
  FilterConfig f;
  VehicleState s;
  ActuatorState act;
  CurrentState current;
  const double dt = 0.1;
  for (int i = 0; i < 300; ++i) {
    act.propeller_speed = pi.update(s.linear_velocity[0], dt);
    CHECK(act.propeller_speed >= 0.0);
    CHECK(act.propeller_speed <= pi.output_max);
    s = step(s, act, current, params, dt);
  }
  CHECK(s.linear_velocity[0] == doctest::Approx(pi.setpoint).epsilon(0.02));

  // Settles within 30 s of a setpoint change as well.
  pi.setpoint = 1.0;
  for (int i = 0; i < 300; ++i) {
    act.propeller_speed = pi.update(s.linear_velocity[0], dt);
    s = step(s, act, current, params, dt);
  }
  CHECK(s.linear_velocity[0] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("conditional integration stops windup while saturated") {
  PiController pi;
  pi.kp = 1.0;
  pi.ki = 1.0;
  pi.setpoint = 100.0;  // unreachable: output pegs at output_max
  pi.output_max = 10.0;
  double prev_integral = pi.integral;
  for (int i = 0; i < 50; ++i) {
    const double out = pi.update(0.0, 0.1);
    CHECK(out == 10.0);
    // Positive error while pegged high: integral must freeze.
    CHECK(pi.integral == prev_integral);
    prev_integral = pi.integral;
  }
  // While pegged high, a slight overshoot (negative error) is allowed to
  // unwind the integral back toward the band.
  pi.integral = 20.0;
  pi.update(pi.setpoint + 1.0, 0.1);
  CHECK(pi.integral < 20.0);
}
