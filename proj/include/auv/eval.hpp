#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "auv/environment.hpp"
#include "auv/ppo.hpp"

namespace auv {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic feedback policy: observation -> fin actions in [-1, 1]^2.
using Policy = std::function<Eigen::Vector2d(const Eigen::VectorXd&)>;

/// Deterministic evaluation mode of a trained network (policy mean).
Policy deterministic_policy(std::shared_ptr<const ActorCritic> net);

/// Scripted lookahead-guidance baseline driving the course and elevation
/// errors (observation slots 9 and 10) to zero with proportional fins.
Policy scripted_guidance_policy(double gain_chi = 4.0, double gain_upsilon = 4.0);

/// Run one full episode under a policy; optionally record the trajectory.
EpisodeOutcome run_episode(Environment& env, const Policy& policy);

struct MetricsRow {
  Difficulty difficulty = Difficulty::kBeginner;
  double success_rate = 0.0;       // percent
  double collision_rate = 0.0;     // percent
  double avg_tracking_error = 0.0; // m, mean of per-episode averages
  int episodes = 0;
};

struct MetricsReport {
  double lambda_r = 0.0;
  std::vector<MetricsRow> rows;

  std::string to_text() const;
  void save_csv(const std::string& path) const;
};

/// N seeded random scenarios of one difficulty under a deterministic policy.
MetricsRow run_quantitative(const Policy& policy, Difficulty difficulty, int episodes,
                            std::uint64_t seed, const Config& cfg);

/// Fixed, version-pinned pure path-following scenario (no obstacles), with
/// curvature in both the horizontal and vertical plane.
ScenarioConfig make_pure_pf_scenario(bool current_on);

/// Hemispherical dead-end: overlapping obstacle spheres on a 20 m
/// half-sphere centered on the path, opening toward the incoming path.
ScenarioConfig make_dead_end_scenario();

enum class StackDirection { kHorizontal, kVertical };

/// Row of tangent spheres across the path, wide along the stacking axis and
/// one sphere thin across it.
ScenarioConfig make_stacked_scenario(StackDirection direction);

/// Least-squares fit of y = a x^2 + b x + c via the normal equations.
std::array<double, 3> fit_quadratic(const std::vector<double>& xs, const std::vector<double>& ys);

/// Least-squares fit of y = a e^{bx} + c: coarse grid over b with a linear
/// solve for (a, c), then local refinement of b.
std::array<double, 3> fit_exponential(const std::vector<double>& xs,
                                      const std::vector<double>& ys);

/// Relative tracking-error increase in percent; nullopt when the ideal error
/// is not positive (sensitivity undefined).
std::optional<double> disturbance_sensitivity(double err_ideal, double err_perturbed);

}  // namespace auv
