#pragma once

#include <algorithm>

#include "auv/config.hpp"

namespace auv {

/// First-order discrete low-pass filter configuration: a = h / (T_f + h).
struct FilterConfig {
  double time_constant = 0.2;  // T_f, s
  double step = 0.1;           // h, s

  double alpha() const { return step / (time_constant + step); }

  static FilterConfig from_config(const Config& cfg) {
    FilterConfig f;
    f.time_constant = cfg.get_double("control.filter_time_constant");
    f.step = cfg.get_double("env.dt");
    return f;
  }
};

/// delta_t = (1 - a) delta_{t-1} + a u_t. The raw command must already be
/// saturated to the fin range.
inline double low_pass(double prev_output, double raw_command, const FilterConfig& cfg) {
  const double a = cfg.alpha();
  return (1.0 - a) * prev_output + a * raw_command;
}

/// PI surge-speed controller with conditional-integration anti-windup.
struct PiController {
  double kp = 40.0;
  double ki = 10.0;
  double setpoint = 1.5;     // u_d, m/s
  double output_max = 53.0;  // eta_max, rev/s
  double integral = 0.0;     // accumulated error, m

  static PiController from_config(const Config& cfg) {
    PiController pi;
    pi.kp = cfg.get_double("control.pi_kp");
    pi.ki = cfg.get_double("control.pi_ki");
    pi.setpoint = cfg.get_double("control.cruise_speed");
    pi.output_max = cfg.get_double("dynamics.prop_max");
    return pi;
  }

  /// Returns the commanded propeller speed in [0, output_max] and updates the
  /// integral state. The integral is frozen while the output saturates and
  /// further integration would push it deeper into saturation.
  double update(double measured_u, double dt) {
    const double e = setpoint - measured_u;
    const double candidate = integral + e * dt;
    const double unsat = kp * e + ki * candidate;
    if (unsat >= 0.0 && unsat <= output_max) {
      integral = candidate;
      return unsat;
    }
    const double clamped = std::clamp(unsat, 0.0, output_max);
    // Only accept integration that moves the output back toward the band.
    if ((unsat > output_max && e < 0.0) || (unsat < 0.0 && e > 0.0)) {
      integral = candidate;
    }
    return std::clamp(kp * e + ki * integral, 0.0, output_max);
  }
};

}  // namespace auv
