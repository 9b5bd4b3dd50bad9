#include "auv/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace auv {

namespace {

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> kDefaults = {
      // Rigid-body and hydrodynamic parameters (diagonal spheroid model).
      {"dynamics.mass", "18.0"},                // kg
      {"dynamics.inertia_x", "0.04"},           // kg m^2
      {"dynamics.inertia_y", "1.1"},
      {"dynamics.inertia_z", "1.1"},
      {"dynamics.added_mass_u", "1.0"},         // kg
      {"dynamics.added_mass_v", "16.0"},
      {"dynamics.added_mass_w", "16.0"},
      {"dynamics.added_mass_p", "0.01"},        // kg m^2
      {"dynamics.added_mass_q", "1.0"},
      {"dynamics.added_mass_r", "1.0"},
      {"dynamics.dlin_u", "2.4"},               // linear damping, N s/m or N m s
      {"dynamics.dlin_v", "23.0"},
      {"dynamics.dlin_w", "23.0"},
      {"dynamics.dlin_p", "0.3"},
      {"dynamics.dlin_q", "9.7"},
      {"dynamics.dlin_r", "9.7"},
      {"dynamics.dquad_u", "2.4"},              // quadratic damping (incl. lift)
      {"dynamics.dquad_v", "80.0"},
      {"dynamics.dquad_w", "80.0"},
      {"dynamics.dquad_p", "0.01"},
      {"dynamics.dquad_q", "9.1"},
      {"dynamics.dquad_r", "9.1"},
      {"dynamics.net_buoyancy", "0.5"},         // B - W > 0: slightly buoyant, N
      {"dynamics.cog_z", "0.01"},               // CG below CB, m (z down)
      {"dynamics.thrust_coeff", "0.005"},       // N per (rev/s)^2
      {"dynamics.prop_max", "53.0"},            // rev/s; trim surge ~2 m/s
      {"dynamics.fin_lift_coeff", "4.0"},       // N per rad per (m/s)^2
      {"dynamics.fin_arm", "-0.55"},            // fin x offset from CO, m
      {"dynamics.delta_max_deg", "30.0"},
      {"dynamics.pitch_singularity_margin", "1e-3"},

      // Gauss-Markov ocean current.
      {"current.mu", "0.05"},                   // 1/s mean reversion
      {"current.noise_std", "0.1"},             // m/s per sqrt(s)
      {"current.min_speed", "0.5"},             // m/s clamp band
      {"current.max_speed", "1.0"},

      // Fin low-pass filter and PI surge-speed controller.
      {"control.filter_time_constant", "0.2"},  // s
      {"control.pi_kp", "40.0"},
      {"control.pi_ki", "10.0"},
      {"control.cruise_speed", "1.5"},          // m/s desired surge

      // Guidance and path construction.
      {"guidance.lookahead", "9.0"},            // m, ~5 body lengths
      {"path.arc_resolution", "0.1"},           // m, arc-length lookup table

      // Forward-looking sonar.
      {"sonar.rows", "15"},
      {"sonar.cols", "15"},
      {"sonar.apex_deg", "140.0"},
      {"sonar.range", "25.0"},                  // m
      {"sonar.update_period", "1.0"},           // s

      // Reward weights.
      {"reward.c_chi", "-1.0"},
      {"reward.c_upsilon", "-1.0"},
      {"reward.c_phi", "-0.5"},
      {"reward.c_r", "-0.5"},
      {"reward.c_delta_r", "-0.1"},
      {"reward.c_delta_s", "-0.1"},
      {"reward.lambda_r", "0.9"},               // studied presets: 0.9, 0.5, 0.1
      {"reward.gamma_c", "1.0"},
      {"reward.eps_c", "1e-4"},
      {"reward.eps_oa", "0.05"},
      {"reward.gamma_a_deg", "140.0"},          // angular normalizer = apex

      // Episode orchestration.
      {"env.dt", "0.1"},                        // s control step
      {"env.n_waypoints", "7"},
      {"env.segment_length_min", "15.0"},       // m
      {"env.segment_length_max", "30.0"},
      {"env.max_turn_azimuth_deg", "60.0"},
      {"env.max_turn_elevation_deg", "30.0"},
      {"env.obstacle_radius_min", "2.0"},       // m
      {"env.obstacle_radius_max", "6.0"},
      {"env.offpath_offset_min", "5.0"},        // m lateral band
      {"env.offpath_offset_max", "15.0"},
      {"env.acceptance_radius", "1.0"},         // m, d_a
      {"env.safety_radius", "1.0"},             // m, d_safety
      {"env.timeout_factor", "3.0"},            // max steps = f * L / (u_d dt)

      // PPO.
      {"ppo.gamma", "0.99"},
      {"ppo.gae_lambda", "0.95"},
      {"ppo.clip", "0.2"},
      {"ppo.actors", "8"},
      {"ppo.horizon", "1024"},
      {"ppo.epochs", "4"},
      {"ppo.minibatch", "256"},
      {"ppo.learning_rate", "3e-4"},
      {"ppo.grad_clip", "0.5"},
      {"ppo.value_coeff", "0.5"},
      {"ppo.entropy_coeff", "0.0"},
      {"ppo.total_steps", "500000"},
      {"ppo.log_std_init", "-0.7"},
      {"ppo.hidden", "64"},

      // Curriculum promotion.
      {"curriculum.promote_success_rate", "0.9"},
      {"curriculum.promote_window", "50"},
      {"curriculum.level_step_budget", "100000"},
      {"curriculum.max_level", "expert"},

      {"experiment.seed", "1"},
  };
  return kDefaults;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::defaults() {
  Config c;
  c.values_ = default_values();
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  it->second = value;
}

void Config::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    }
    try {
      set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path);
}

const std::string& Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("key " + key + ": not a number: '" + v + "'");
  }
  return d;
}

int Config::get_int(const std::string& key) const {
  const double d = get_double(key);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) throw ConfigError("key " + key + ": not an integer");
  return i;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key " + key + ": not a boolean: '" + v + "'");
}

const std::string& Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::to_string() const {
  std::ostringstream out;
  std::string section;
  for (const auto& [key, value] : values_) {
    const std::string sec = key.substr(0, key.find('.'));
    if (sec != section) {
      if (!section.empty()) out << "\n";
      section = sec;
    }
    out << key << " = " << value << "\n";
  }
  return out.str();
}

void Config::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << to_string();
}

}  // namespace auv
