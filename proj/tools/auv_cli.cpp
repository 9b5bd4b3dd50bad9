#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "auv/eval.hpp"
#include "auv/ppo.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  double lambda_r = -1.0;
  long seed = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Config file (key = value)");
  cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set ppo.gamma=0.98");
  cmd->add_option("--lambda-r", opts.lambda_r, "Shortcut for reward.lambda_r");
  cmd->add_option("--seed", opts.seed, "Shortcut for experiment.seed");
}

auv::Config resolve_config(const CommonOptions& opts) {
  auv::Config cfg = auv::Config::defaults();
  if (!opts.config_path.empty()) cfg.load_file(opts.config_path);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw auv::ConfigError("--set expects key=value, got: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.lambda_r >= 0.0) cfg.set("reward.lambda_r", std::to_string(opts.lambda_r));
  if (opts.seed >= 0) cfg.set("experiment.seed", std::to_string(opts.seed));
  return cfg;
}

fs::path resolve_out_dir(const std::string& out) {
  fs::path p(out);
  const char* root = std::getenv("AUV_OUTPUT_ROOT");
  if (root != nullptr && p.is_relative()) p = fs::path(root) / p;
  fs::create_directories(p);
  return p;
}

void dump_scene(const auv::ScenarioConfig& scenario, const auv::Config& cfg,
                const fs::path& dir) {
  scenario.waypoints.save((dir / "waypoints.txt").string());
  auv::save_obstacles(scenario.obstacles, (dir / "obstacles.txt").string());
  const auto path = auv::QpmiPath::build(scenario.waypoints, cfg.get_double("path.arc_resolution"));
  std::ofstream out(dir / "path_samples.csv");
  out << "s,x,y,z\n";
  out.precision(10);
  for (double s = 0.0; s <= path.total_length(); s += 1.0) {
    const Eigen::Vector3d p = path.position(s);
    out << s << "," << p.x() << "," << p.y() << "," << p.z() << "\n";
  }
  std::ofstream meta(dir / "scenario.txt");
  meta << "difficulty = " << to_string(scenario.difficulty) << "\n"
       << "seed = " << scenario.seed << "\n"
       << "current_enabled = " << (scenario.current_enabled ? "true" : "false") << "\n"
       << "path_length = " << path.total_length() << "\n";
}

int cmd_train(const CommonOptions& opts, const std::string& out) {
  const auv::Config cfg = resolve_config(opts);
  const fs::path dir = resolve_out_dir(out);
  cfg.save_file((dir / "config.txt").string());

  std::cout << "training: total_steps = " << cfg.get_string("ppo.total_steps")
            << ", lambda_r = " << cfg.get_string("reward.lambda_r")
            << ", seed = " << cfg.get_string("experiment.seed") << "\n";
  const auv::TrainResult result = auv::train(cfg, [&](const auv::CurvePoint& p) {
    std::cout << "iter " << p.iteration << "  steps " << p.env_steps << "  level " << p.level
              << "  return " << p.mean_return << "  success " << p.success_rate
              << "  err " << p.mean_tracking_error << "  vloss " << p.value_loss
              << "  kl " << p.approx_kl << "\n";
  });
  result.net->save((dir / "checkpoint.txt").string());
  auv::save_curves_csv(result.curves, (dir / "curves.csv").string());
  std::cout << "wrote " << (dir / "checkpoint.txt") << "\n";
  return 0;
}

int cmd_eval(const CommonOptions& opts, const std::string& checkpoint, const std::string& suite,
             int episodes, const std::string& out) {
  const auv::Config cfg = resolve_config(opts);
  const fs::path dir = resolve_out_dir(out);
  cfg.save_file((dir / "config.txt").string());
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_double("experiment.seed"));

  auv::Policy policy;
  if (checkpoint == "scripted") {
    policy = auv::scripted_guidance_policy();
  } else {
    auto net = std::make_shared<auv::ActorCritic>(auv::ActorCritic::load(checkpoint));
    policy = auv::deterministic_policy(net);
  }

  if (suite == "quantitative") {
    auv::MetricsReport report;
    report.lambda_r = cfg.get_double("reward.lambda_r");
    for (auv::Difficulty d :
         {auv::Difficulty::kIntermediate, auv::Difficulty::kProficient,
          auv::Difficulty::kAdvanced, auv::Difficulty::kExpert}) {
      report.rows.push_back(auv::run_quantitative(policy, d, episodes, seed, cfg));
    }
    std::cout << report.to_text();
    report.save_csv((dir / "quantitative.csv").string());
  } else if (suite == "pf") {
    std::ofstream table(dir / "pf_report.csv");
    table << "condition,avg_tracking_error,status\n";
    double ideal_err = 0.0, perturbed_err = 0.0;
    for (const bool current_on : {false, true}) {
      auv::Environment env(auv::make_pure_pf_scenario(current_on), cfg);
      env.set_recording(true);
      const auv::EpisodeOutcome outcome = auv::run_episode(env, policy);
      const std::string name = current_on ? "perturbed" : "ideal";
      env.save_trajectory_csv((dir / ("pf_" + name + ".csv")).string());
      table << name << "," << outcome.avg_tracking_error << "," << to_string(outcome.status)
            << "\n";
      (current_on ? perturbed_err : ideal_err) = outcome.avg_tracking_error;
      std::cout << name << ": avg tracking error " << outcome.avg_tracking_error << " m, "
                << to_string(outcome.status) << "\n";
    }
    const auto sens = auv::disturbance_sensitivity(ideal_err, perturbed_err);
    if (sens) {
      table << "sensitivity_percent," << *sens << ",\n";
      std::cout << "disturbance sensitivity: " << *sens << " %\n";
    } else {
      table << "sensitivity_percent,n/a,\n";
      std::cout << "disturbance sensitivity: n/a\n";
    }
  } else if (suite == "dead-end") {
    auv::Environment env(auv::make_dead_end_scenario(), cfg);
    env.set_recording(true);
    const auv::EpisodeOutcome outcome = auv::run_episode(env, policy);
    env.save_trajectory_csv((dir / "dead_end.csv").string());
    std::cout << "dead-end: " << to_string(outcome.status) << " after " << outcome.steps
              << " steps, avg err " << outcome.avg_tracking_error << " m\n";
  } else if (suite == "stacked") {
    for (const auto& [name, direction] :
         {std::pair{"horizontal", auv::StackDirection::kHorizontal},
          std::pair{"vertical", auv::StackDirection::kVertical}}) {
      auv::Environment env(auv::make_stacked_scenario(direction), cfg);
      env.set_recording(true);
      const auv::EpisodeOutcome outcome = auv::run_episode(env, policy);
      env.save_trajectory_csv((dir / (std::string("stacked_") + name + ".csv")).string());
      std::cout << "stacked " << name << ": " << to_string(outcome.status) << " after "
                << outcome.steps << " steps, avg err " << outcome.avg_tracking_error << " m\n";
    }
  } else {
    throw CLI::ValidationError("--suite", "unknown suite: " + suite);
  }
  return 0;
}

int cmd_scenario(const CommonOptions& opts, const std::string& name, const std::string& out) {
  const auv::Config cfg = resolve_config(opts);
  const fs::path dir = resolve_out_dir(out);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_double("experiment.seed"));

  auv::ScenarioConfig scenario;
  if (name == "pf") {
    scenario = auv::make_pure_pf_scenario(false);
  } else if (name == "dead-end") {
    scenario = auv::make_dead_end_scenario();
  } else if (name == "stacked-h") {
    scenario = auv::make_stacked_scenario(auv::StackDirection::kHorizontal);
  } else if (name == "stacked-v") {
    scenario = auv::make_stacked_scenario(auv::StackDirection::kVertical);
  } else {
    scenario = auv::make_scenario(auv::difficulty_from_string(name), seed, cfg);
  }
  dump_scene(scenario, cfg, dir);
  std::cout << "wrote scene to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AUV path-following / collision-avoidance simulator and PPO trainer"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string out = "out";
  std::string checkpoint, suite = "quantitative", scenario_name = "beginner";
  int episodes = 5;

  auto* train_cmd = app.add_subcommand("train", "Run curriculum PPO training");
  add_common(train_cmd, opts);
  train_cmd->add_option("--out", out, "Output directory");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a test suite");
  add_common(eval_cmd, opts);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file, or 'scripted'")->required();
  eval_cmd->add_option("--suite", suite, "quantitative | pf | dead-end | stacked");
  eval_cmd->add_option("--episodes", episodes, "Episodes per difficulty (quantitative)");
  eval_cmd->add_option("--out", out, "Output directory");

  auto* scenario_cmd = app.add_subcommand("scenario", "Dump a scenario for inspection");
  add_common(scenario_cmd, opts);
  scenario_cmd->add_option("--name", scenario_name,
                           "beginner..expert | pf | dead-end | stacked-h | stacked-v");
  scenario_cmd->add_option("--out", out, "Output directory");

  auto* print_cmd = app.add_subcommand("print-config", "Print the resolved configuration");
  add_common(print_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(opts, out);
    if (eval_cmd->parsed()) return cmd_eval(opts, checkpoint, suite, episodes, out);
    if (scenario_cmd->parsed()) return cmd_scenario(opts, scenario_name, out);
    if (print_cmd->parsed()) {
      std::cout << resolve_config(opts).to_string();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
