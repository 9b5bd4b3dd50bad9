#include "auv/eval.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace auv {

Policy deterministic_policy(std::shared_ptr<const ActorCritic> net) {
  return [net](const Eigen::VectorXd& obs) -> Eigen::Vector2d {
    const auto [mean, std_dev] = net->policy_forward(obs);
    (void)std_dev;
    return mean.head<2>().cwiseMax(-1.0).cwiseMin(1.0);
  };
}

Policy scripted_guidance_policy(double gain_chi, double gain_upsilon) {
  return [gain_chi, gain_upsilon](const Eigen::VectorXd& obs) -> Eigen::Vector2d {
    const double chi_err = obs[9] * M_PI;      // denormalize course error
    const double ups_err = obs[10] * M_PI;     // denormalize elevation error
    // Stern-fin sign convention: positive rudder yaws negative, positive
    // elevator pitches up.
    Eigen::Vector2d action(-gain_chi * chi_err, gain_upsilon * ups_err);
    return action.cwiseMax(-1.0).cwiseMin(1.0);
  };
}

EpisodeOutcome run_episode(Environment& env, const Policy& policy) {
  Eigen::VectorXd obs = env.reset();
  while (!env.done()) {
    const auto result = env.step(policy(obs));
    obs = result.observation;
  }
  return env.outcome();
}

MetricsRow run_quantitative(const Policy& policy, Difficulty difficulty, int episodes,
                            std::uint64_t seed, const Config& cfg) {
  MetricsRow row;
  row.difficulty = difficulty;
  row.episodes = episodes;
  Rng scenario_seeds(seed);
  int successes = 0, collisions = 0;
  double error_sum = 0.0;
  for (int i = 0; i < episodes; ++i) {
    const ScenarioConfig scenario = make_scenario(difficulty, scenario_seeds.next_u64(), cfg);
    Environment env(scenario, cfg);
    const EpisodeOutcome outcome = run_episode(env, policy);
    successes += outcome.status == EpisodeStatus::kSuccess ? 1 : 0;
    collisions += outcome.status == EpisodeStatus::kCollision ? 1 : 0;
    error_sum += outcome.avg_tracking_error;
  }
  row.success_rate = 100.0 * successes / std::max(1, episodes);
  row.collision_rate = 100.0 * collisions / std::max(1, episodes);
  row.avg_tracking_error = error_sum / std::max(1, episodes);
  return row;
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << "lambda_r = " << lambda_r << "\n";
  out << std::left << std::setw(14) << "difficulty" << std::right << std::setw(12)
      << "success[%]" << std::setw(14) << "collision[%]" << std::setw(14) << "avg err[m]"
      << std::setw(10) << "episodes" << "\n";
  for (const MetricsRow& row : rows) {
    out << std::left << std::setw(14) << to_string(row.difficulty) << std::right << std::fixed
        << std::setprecision(1) << std::setw(12) << row.success_rate << std::setw(14)
        << row.collision_rate << std::setprecision(3) << std::setw(14)
        << row.avg_tracking_error << std::setw(10) << row.episodes << "\n";
    out.unsetf(std::ios::fixed);
  }
  return out.str();
}

void MetricsReport::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file: " + path);
  out << "lambda_r,difficulty,success_rate,collision_rate,avg_tracking_error,episodes\n";
  out.precision(10);
  for (const MetricsRow& row : rows) {
    out << lambda_r << "," << to_string(row.difficulty) << "," << row.success_rate << ","
        << row.collision_rate << "," << row.avg_tracking_error << "," << row.episodes << "\n";
  }
}

ScenarioConfig make_pure_pf_scenario(bool current_on) {
  ScenarioConfig scenario;
  scenario.difficulty = Difficulty::kBeginner;
  scenario.seed = 42;
  scenario.waypoints.points = {
      {0.0, 0.0, 0.0},    {30.0, 12.0, -2.0},  {60.0, 4.0, -10.0}, {90.0, -14.0, -13.0},
      {120.0, -6.0, -5.0}, {150.0, 10.0, -1.0}, {180.0, 0.0, -6.0},
  };
  scenario.current_enabled = current_on;
  return scenario;
}

ScenarioConfig make_dead_end_scenario() {
  ScenarioConfig scenario;
  scenario.difficulty = Difficulty::kAdvanced;
  scenario.seed = 43;
  scenario.waypoints.points = {
      {0.0, 0.0, 0.0}, {45.0, 0.0, 0.0}, {90.0, 0.0, 0.0}, {135.0, 0.0, 0.0}, {180.0, 0.0, 0.0},
  };
  const Eigen::Vector3d shell_center(90.0, 0.0, 0.0);
  const double shell_radius = 20.0;
  const double sphere_radius = 2.5;
  // Overlapping spheres on the forward-facing half-sphere; the opening faces
  // the incoming path (-x side is free). Grid spacing is kept below
  // sphere_radius * sqrt(2) so the lattice covers the surface without holes.
  const double polar_step = 9.0 * M_PI / 180.0;
  for (double polar = 0.0; polar < M_PI / 2.0 + 1e-9; polar += polar_step) {
    const double ring_radius = shell_radius * std::sin(polar);
    const double circumference = 2.0 * M_PI * ring_radius;
    const int count = std::max(1, static_cast<int>(std::ceil(circumference / 3.4)));
    for (int i = 0; i < count; ++i) {
      const double az = 2.0 * M_PI * i / count;
      const Eigen::Vector3d dir(std::cos(polar), std::sin(polar) * std::cos(az),
                                std::sin(polar) * std::sin(az));
      scenario.obstacles.push_back({shell_center + shell_radius * dir, sphere_radius});
    }
  }
  return scenario;
}

ScenarioConfig make_stacked_scenario(StackDirection direction) {
  ScenarioConfig scenario;
  scenario.difficulty = Difficulty::kAdvanced;
  scenario.seed = 44;
  scenario.waypoints.points = {
      {0.0, 0.0, 0.0}, {40.0, 0.0, 0.0}, {80.0, 0.0, 0.0}, {120.0, 0.0, 0.0}, {160.0, 0.0, 0.0},
  };
  const Eigen::Vector3d wall_center(80.0, 0.0, 0.0);
  const double radius = 3.0;
  const Eigen::Vector3d axis = direction == StackDirection::kHorizontal
                                   ? Eigen::Vector3d::UnitY()
                                   : Eigen::Vector3d::UnitZ();
  for (int k = -3; k <= 3; ++k) {
    scenario.obstacles.push_back({wall_center + 2.0 * radius * k * axis, radius});
  }
  return scenario;
}

std::array<double, 3> fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 3 || xs.size() != ys.size()) {
    throw FitError("quadratic fit needs at least 3 (x, y) points");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = xs[i] * xs[i];
    design(i, 1) = xs[i];
    design(i, 2) = 1.0;
    target[i] = ys[i];
  }
  const Eigen::Matrix3d gram = design.transpose() * design;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(gram);
  if (!lu.isInvertible()) throw FitError("degenerate design matrix in quadratic fit");
  const Eigen::Vector3d coeff = lu.solve(design.transpose() * target);
  return {coeff[0], coeff[1], coeff[2]};
}

namespace {

// Residual of the best (a, c) for a fixed exponent b; a and c by 2x2 normal
// equations on the basis {e^{bx}, 1}.
double exp_fit_residual(const std::vector<double>& xs, const std::vector<double>& ys, double b,
                        double* a_out, double* c_out) {
  double suu = 0.0, su = 0.0, suy = 0.0, sy = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = std::exp(b * xs[i]);
    suu += u * u;
    su += u;
    suy += u * ys[i];
    sy += ys[i];
  }
  const double det = suu * n - su * su;
  if (std::abs(det) < 1e-12 * std::max(1.0, suu * n)) return std::numeric_limits<double>::max();
  const double a = (suy * n - su * sy) / det;
  const double c = (suu * sy - su * suy) / det;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = a * std::exp(b * xs[i]) + c - ys[i];
    sse += r * r;
  }
  if (a_out) *a_out = a;
  if (c_out) *c_out = c;
  return sse;
}

}  // namespace

std::array<double, 3> fit_exponential(const std::vector<double>& xs,
                                      const std::vector<double>& ys) {
  if (xs.size() < 3 || xs.size() != ys.size()) {
    throw FitError("exponential fit needs at least 3 (x, y) points");
  }
  double span = 0.0;
  for (double x : xs) span = std::max(span, std::abs(x));
  if (span <= 0.0) throw FitError("degenerate design matrix in exponential fit");
  const double b_max = 30.0 / span;  // keep exp() in range

  double best_b = 0.0;
  double best_sse = std::numeric_limits<double>::max();
  const int grid = 3000;
  for (int i = 0; i <= grid; ++i) {
    const double b = -b_max + 2.0 * b_max * i / grid;
    const double sse = exp_fit_residual(xs, ys, b, nullptr, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best_b = b;
    }
  }
  // Golden-section refinement of b around the best grid cell.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = best_b - 2.0 * b_max / grid, hi = best_b + 2.0 * b_max / grid;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = exp_fit_residual(xs, ys, x1, nullptr, nullptr);
  double f2 = exp_fit_residual(xs, ys, x2, nullptr, nullptr);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(best_b)); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = exp_fit_residual(xs, ys, x1, nullptr, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = exp_fit_residual(xs, ys, x2, nullptr, nullptr);
    }
  }
  double a = 0.0, c = 0.0;
  const double b = 0.5 * (lo + hi);
  if (exp_fit_residual(xs, ys, b, &a, &c) == std::numeric_limits<double>::max()) {
    throw FitError("degenerate design matrix in exponential fit");
  }
  return {a, b, c};
}

std::optional<double> disturbance_sensitivity(double err_ideal, double err_perturbed) {
  if (!(err_ideal > 0.0)) return std::nullopt;
  return 100.0 * (err_perturbed - err_ideal) / err_ideal;
}

}  // namespace auv
