#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auv/environment.hpp"

using namespace auv;

namespace {

Config test_config() { return Config::defaults(); }

double min_distance_to_path_ends(const QpmiPath& path, const Obstacle& obs) {
  const double L = path.total_length();
  double dmin = std::numeric_limits<double>::max();
  for (double s = 0.0; s <= L + 1e-9; s += 0.25) {
    if (s > L / 3.0 && s < 2.0 * L / 3.0) continue;
    dmin = std::min(dmin, (path.position(s) - obs.center).norm() - obs.radius);
  }
  return dmin;
}

}  // namespace

TEST_CASE("difficulty names round-trip") {
  for (const char* name : {"beginner", "intermediate", "proficient", "advanced", "expert"}) {
    CHECK(to_string(difficulty_from_string(name)) == name);
  }
  CHECK_THROWS_AS(difficulty_from_string("impossible"), std::invalid_argument);
}

TEST_CASE("scenario invariants hold per difficulty over 100 seeds") {
  const Config cfg = test_config();
  Rng seeds(20240817);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t seed = seeds.next_u64();

    const ScenarioConfig beginner = make_scenario(Difficulty::kBeginner, seed, cfg);
    REQUIRE(beginner.waypoints.size() == 7);
    CHECK(beginner.obstacles.empty());
    CHECK_FALSE(beginner.current_enabled);

    const ScenarioConfig inter = make_scenario(Difficulty::kIntermediate, seed, cfg);
    REQUIRE(inter.obstacles.size() == 1);
    const QpmiPath path = QpmiPath::build(inter.waypoints);
    // The single obstacle is centered on the path midpoint.
    CHECK((inter.obstacles[0].center - path.position(path.total_length() / 2)).norm() < 1e-6);
    CHECK_FALSE(inter.current_enabled);

    const ScenarioConfig prof = make_scenario(Difficulty::kProficient, seed, cfg);
    REQUIRE(prof.obstacles.size() == 3);
    const double L = path.total_length();
    CHECK((prof.obstacles[1].center - path.position(L / 2 - L / 12)).norm() < 1e-6);
    CHECK((prof.obstacles[2].center - path.position(L / 2 + L / 12)).norm() < 1e-6);

    const ScenarioConfig adv = make_scenario(Difficulty::kAdvanced, seed, cfg);
    REQUIRE(adv.obstacles.size() == 8);
    CHECK_FALSE(adv.current_enabled);
    // The five extra obstacles sit off the path in the middle third.
    for (std::size_t i = 3; i < adv.obstacles.size(); ++i) {
      const PathPoint cp = QpmiPath::build(adv.waypoints).closest_point(adv.obstacles[i].center);
      CHECK(cp.arc_length > L / 3 - 16.0);
      CHECK(cp.arc_length < 2 * L / 3 + 16.0);
    }

    const ScenarioConfig expert = make_scenario(Difficulty::kExpert, seed, cfg);
    CHECK(expert.current_enabled);
    // Expert differs from advanced only by the current flag.
    REQUIRE(expert.obstacles.size() == adv.obstacles.size());
    for (std::size_t i = 0; i < adv.obstacles.size(); ++i) {
      CHECK((expert.obstacles[i].center - adv.obstacles[i].center).norm() == 0.0);
      CHECK(expert.obstacles[i].radius == adv.obstacles[i].radius);
    }
    for (std::size_t i = 0; i < expert.waypoints.size(); ++i) {
      CHECK((expert.waypoints.points[i] - adv.waypoints.points[i]).norm() == 0.0);
    }

    // First and last path thirds stay collision-free in every scenario.
    for (const Obstacle& obs : adv.obstacles) {
      CHECK(min_distance_to_path_ends(path, obs) > cfg.get_double("env.safety_radius"));
    }
  }
}

TEST_CASE("scenario generation is deterministic in the seed") {
  const Config cfg = test_config();
  const ScenarioConfig a = make_scenario(Difficulty::kAdvanced, 99, cfg);
  const ScenarioConfig b = make_scenario(Difficulty::kAdvanced, 99, cfg);
  REQUIRE(a.waypoints.size() == b.waypoints.size());
  for (std::size_t i = 0; i < a.waypoints.size(); ++i) {
    CHECK((a.waypoints.points[i] - b.waypoints.points[i]).norm() == 0.0);
  }
  const ScenarioConfig c = make_scenario(Difficulty::kAdvanced, 100, cfg);
  CHECK((a.waypoints.points[1] - c.waypoints.points[1]).norm() > 0.0);
}

TEST_CASE("reset places the vehicle on the path start at cruise speed") {
  const Config cfg = test_config();
  Environment env(make_scenario(Difficulty::kBeginner, 7, cfg), cfg);
  const Eigen::VectorXd obs = env.reset();
  REQUIRE(obs.size() == Environment::kObservationDim);
  const QpmiPath& path = env.path();
  CHECK((env.state().position - path.position(0.0)).norm() < 1e-9);
  CHECK(env.state().linear_velocity[0] == doctest::Approx(1.5));
  const PathPoint start = path.point_at(0.0);
  CHECK(env.state().attitude[2] == doctest::Approx(start.azimuth).epsilon(1e-9));
  // Aligned and on-path: zero course/elevation error slots.
  CHECK(std::abs(obs[9]) < 1e-6);
  CHECK(std::abs(obs[10]) < 1e-6);
  // Beginner: no obstacles and no current, so sonar block and current slots
  // are all zero.
  CHECK(obs.tail(64).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(obs.segment(11, 3).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("observation normalization uses the documented maxima and clips") {
  VehicleState s;
  s.linear_velocity = {2.0, -0.3, 0.15};
  s.angular_velocity = {1.2, -0.4, 0.2};
  s.attitude = {M_PI / 4, -M_PI / 8, M_PI};
  Vector6d current = Vector6d::Zero();
  current[0] = 0.5;
  const Eigen::MatrixXd pooled = Eigen::MatrixXd::Constant(8, 8, 0.25);
  const Eigen::VectorXd obs = build_observation(s, current, M_PI / 2, -M_PI, pooled);
  REQUIRE(obs.size() == 78);
  CHECK(obs[0] == doctest::Approx(0.75));       // u_r / 2 = (u - u_c) / 2
  CHECK(obs[1] == doctest::Approx(-1.0));       // v_r / 0.3
  CHECK(obs[2] == doctest::Approx(0.5));        // w_r / 0.3
  CHECK(obs[3] == doctest::Approx(0.25));       // phi / pi
  CHECK(obs[4] == doctest::Approx(-0.125));     // theta / pi
  CHECK(obs[5] == doctest::Approx(1.0));        // psi / pi
  CHECK(obs[6] == doctest::Approx(1.0));        // p / 1.2
  CHECK(obs[7] == doctest::Approx(-1.0));       // q / 0.4
  CHECK(obs[8] == doctest::Approx(0.5));        // r / 0.4
  CHECK(obs[9] == doctest::Approx(0.5));        // chi_err / pi
  CHECK(obs[10] == doctest::Approx(-1.0));      // ups_err / pi
  CHECK(obs[11] == doctest::Approx(0.5));       // u_c
  CHECK(obs.tail(64).minCoeff() == 0.25);
  CHECK(obs.tail(64).maxCoeff() == 0.25);

  // Out-of-band values clip to [-1, 1].
  s.linear_velocity = {5.0, 2.0, -2.0};
  const Eigen::VectorXd clipped = build_observation(s, current, 0, 0, pooled);
  CHECK(clipped[0] == 1.0);
  CHECK(clipped[1] == 1.0);
  CHECK(clipped[2] == -1.0);
}

TEST_CASE("an aligned straight run on a straight path succeeds") {
  const Config cfg = test_config();
  ScenarioConfig scenario;
  scenario.difficulty = Difficulty::kBeginner;
  scenario.waypoints.points = {{0, 0, 0}, {20, 0, 0}, {40, 0, 0}, {60, 0, 0}};
  Environment env(scenario, cfg);
  Eigen::VectorXd obs = env.reset();
  Environment::StepResult last;
  while (!env.done()) last = env.step(Eigen::Vector2d::Zero());
  CHECK(last.status == EpisodeStatus::kSuccess);
  CHECK(env.outcome().avg_tracking_error < 0.5);
  // Stepping a finished episode is a programming error.
  CHECK_THROWS_AS(env.step(Eigen::Vector2d::Zero()), std::logic_error);
}

TEST_CASE("driving into a wall of obstacles terminates with a collision") {
  const Config cfg = test_config();
  ScenarioConfig scenario;
  scenario.difficulty = Difficulty::kIntermediate;
  scenario.waypoints.points = {{0, 0, 0}, {20, 0, 0}, {40, 0, 0}, {60, 0, 0}};
  // Dense wall across the path at x = 30; a straight driver must hit it.
  for (int k = -4; k <= 4; ++k) {
    for (int m = -4; m <= 4; ++m) {
      scenario.obstacles.push_back({{30.0, 3.0 * k, 3.0 * m}, 2.0});
    }
  }
  Environment env(scenario, cfg);
  env.reset();
  Environment::StepResult last;
  while (!env.done()) last = env.step(Eigen::Vector2d::Zero());
  CHECK(last.status == EpisodeStatus::kCollision);
  CHECK(env.outcome().steps < env.max_steps());
}

TEST_CASE("episodes stop at the step budget when nothing else happens") {
  const Config cfg = test_config();
  ScenarioConfig scenario;
  scenario.difficulty = Difficulty::kBeginner;
  scenario.waypoints.points = {{0, 0, 0}, {20, 0, 0}, {40, 0, 0}, {60, 10, 0}};
  Environment env(scenario, cfg);
  env.reset();
  // Hard starboard the whole time: the vehicle circles and never finishes.
  Environment::StepResult last;
  while (!env.done()) last = env.step(Eigen::Vector2d(1.0, 0.0));
  CHECK(last.status == EpisodeStatus::kTimeout);
  CHECK(env.outcome().steps == env.max_steps());
  const double expected =
      std::ceil(cfg.get_double("env.timeout_factor") * env.path().total_length() /
                (cfg.get_double("control.cruise_speed") * cfg.get_double("env.dt")));
  CHECK(env.max_steps() == static_cast<int>(expected));
}

TEST_CASE("episode rollouts are reproducible and the sonar refreshes at 1 Hz") {
  const Config cfg = test_config();
  const ScenarioConfig scenario = make_scenario(Difficulty::kExpert, 4242, cfg);

  Environment env1(scenario, cfg), env2(scenario, cfg);
  Eigen::VectorXd o1 = env1.reset(), o2 = env2.reset();
  CHECK((o1 - o2).lpNorm<Eigen::Infinity>() == 0.0);
  Rng action_rng(5);
  for (int i = 0; i < 200 && !env1.done(); ++i) {
    const Eigen::Vector2d a(action_rng.uniform(-1, 1), action_rng.uniform(-1, 1));
    const auto r1 = env1.step(a);
    const auto r2 = env2.step(a);
    REQUIRE(r1.reward == r2.reward);
    REQUIRE((r1.observation - r2.observation).lpNorm<Eigen::Infinity>() == 0.0);
  }

  // Sonar block of the observation only changes every 10 control steps.
  Environment env3(scenario, cfg);
  Eigen::VectorXd prev = env3.reset();
  int changes = 0;
  for (int i = 1; i <= 40 && !env3.done(); ++i) {
    const auto r = env3.step(Eigen::Vector2d::Zero());
    const bool changed =
        (r.observation.tail(64) - prev.tail(64)).lpNorm<Eigen::Infinity>() > 0.0;
    if (changed) {
      CHECK(i % 10 == 0);
      ++changes;
    }
    prev = r.observation;
  }
  (void)changes;
}

TEST_CASE("expert episodes feel the current in the observation") {
  const Config cfg = test_config();
  const ScenarioConfig scenario = make_scenario(Difficulty::kExpert, 31337, cfg);
  Environment env(scenario, cfg);
  const Eigen::VectorXd obs = env.reset();
  CHECK(obs.segment(11, 3).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("trajectory recording captures one row per step") {
  const Config cfg = test_config();
  ScenarioConfig scenario;
  scenario.waypoints.points = {{0, 0, 0}, {20, 0, 0}, {40, 0, 0}, {60, 0, 0}};
  Environment env(scenario, cfg);
  env.set_recording(true);
  env.reset();
  int steps = 0;
  while (!env.done() && steps < 50) {
    env.step(Eigen::Vector2d::Zero());
    ++steps;
  }
  REQUIRE(static_cast<int>(env.trajectory().size()) == steps);
  CHECK(env.trajectory().front().time == doctest::Approx(cfg.get_double("env.dt")));
  CHECK(env.trajectory().back().time == doctest::Approx(steps * cfg.get_double("env.dt")));
}
