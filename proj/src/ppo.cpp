#include "auv/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

namespace auv {

namespace {

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 log(2 pi)

}  // namespace

PpoConfig PpoConfig::from_config(const Config& cfg) {
  PpoConfig p;
  p.gamma = cfg.get_double("ppo.gamma");
  p.gae_lambda = cfg.get_double("ppo.gae_lambda");
  p.clip = cfg.get_double("ppo.clip");
  p.actors = cfg.get_int("ppo.actors");
  p.horizon = cfg.get_int("ppo.horizon");
  p.epochs = cfg.get_int("ppo.epochs");
  p.minibatch = cfg.get_int("ppo.minibatch");
  p.learning_rate = cfg.get_double("ppo.learning_rate");
  p.grad_clip = cfg.get_double("ppo.grad_clip");
  p.value_coeff = cfg.get_double("ppo.value_coeff");
  p.entropy_coeff = cfg.get_double("ppo.entropy_coeff");
  p.total_steps = static_cast<long>(cfg.get_double("ppo.total_steps"));
  p.log_std_init = cfg.get_double("ppo.log_std_init");
  p.hidden = cfg.get_int("ppo.hidden");
  return p;
}

ActorCritic::ActorCritic(int obs_dim, int act_dim, int hidden, double log_std_init, Rng& rng) {
  policy_spec_.sizes = {obs_dim, hidden, hidden, act_dim};
  value_spec_.sizes = {obs_dim, hidden, hidden, 1};
  act_dim_ = act_dim;
  log_std_offset_ = policy_spec_.param_count();
  value_offset_ = log_std_offset_ + act_dim;
  params_.resize(value_offset_ + value_spec_.param_count());
  params_.head(log_std_offset_) = mlp_init(policy_spec_, rng);
  params_.segment(log_std_offset_, act_dim).setConstant(log_std_init);
  params_.tail(value_spec_.param_count()) = mlp_init(value_spec_, rng, 1.0);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ActorCritic::policy_forward(
    const Eigen::VectorXd& obs) const {
  Eigen::VectorXd mean = mlp_forward(policy_spec_, params_, obs);
  Eigen::VectorXd std_dev(act_dim_);
  for (int k = 0; k < act_dim_; ++k) {
    std_dev[k] = std::exp(std::clamp(params_[log_std_offset_ + k], kLogStdMin, kLogStdMax));
  }
  if (!mean.allFinite() || !std_dev.allFinite()) {
    throw SimulationDivergedError("policy forward produced non-finite output");
  }
  return {std::move(mean), std::move(std_dev)};
}

double ActorCritic::value(const Eigen::VectorXd& obs) const {
  return mlp_forward(value_spec_, params_.tail(value_spec_.param_count()), obs)[0];
}

Eigen::VectorXd ActorCritic::sample_action(const Eigen::VectorXd& obs, Rng& rng,
                                           double* log_prob_out) const {
  const auto [mean, std_dev] = policy_forward(obs);
  Eigen::VectorXd action(act_dim_);
  for (int k = 0; k < act_dim_; ++k) action[k] = mean[k] + std_dev[k] * rng.normal();
  if (log_prob_out) *log_prob_out = log_prob(obs, action);
  return action;
}

double ActorCritic::log_prob(const Eigen::VectorXd& obs, const Eigen::VectorXd& action) const {
  const auto [mean, std_dev] = policy_forward(obs);
  double lp = 0.0;
  for (int k = 0; k < act_dim_; ++k) {
    const double z = (action[k] - mean[k]) / std_dev[k];
    lp += -0.5 * z * z - std::log(std_dev[k]) - kHalfLog2Pi;
  }
  return lp;
}

void ActorCritic::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "auv-actor-critic v1\n";
  out << "policy";
  for (int s : policy_spec_.sizes) out << " " << s;
  out << "\nvalue";
  for (int s : value_spec_.sizes) out << " " << s;
  out << "\nparams " << params_.size() << "\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < params_.size(); ++i) out << params_[i] << "\n";
}

ActorCritic ActorCritic::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "auv-actor-critic v1") {
    throw std::runtime_error("bad checkpoint header in " + path);
  }
  ActorCritic net;
  const auto read_sizes = [&](const std::string& tag, MlpSpec& spec) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated checkpoint: " + path);
    std::istringstream ls(line);
    std::string got;
    ls >> got;
    if (got != tag) throw std::runtime_error("bad checkpoint section '" + got + "' in " + path);
    int s;
    while (ls >> s) spec.sizes.push_back(s);
    if (spec.sizes.size() < 2) throw std::runtime_error("bad shape header in " + path);
  };
  read_sizes("policy", net.policy_spec_);
  read_sizes("value", net.value_spec_);
  net.act_dim_ = net.policy_spec_.sizes.back();
  net.log_std_offset_ = net.policy_spec_.param_count();
  net.value_offset_ = net.log_std_offset_ + net.act_dim_;
  std::string tag;
  Eigen::Index count = 0;
  in >> tag >> count;
  const Eigen::Index expected = net.value_offset_ + net.value_spec_.param_count();
  if (tag != "params" || count != expected) {
    throw std::runtime_error("checkpoint shape mismatch in " + path);
  }
  net.params_.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> net.params_[i])) throw std::runtime_error("truncated checkpoint: " + path);
  }
  return net;
}

std::vector<double> gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        double bootstrap_value, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  std::vector<double> advantages(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = (i + 1 < n) ? values[i + 1] : bootstrap_value;
    const double delta = rewards[i] + gamma * next_value - values[i];
    acc = delta + gamma * lambda * acc;
    advantages[i] = acc;
  }
  return advantages;
}

double clipped_surrogate(const Eigen::VectorXd& log_prob_new, const Eigen::VectorXd& log_prob_old,
                         const Eigen::VectorXd& advantage, double epsilon) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < advantage.size(); ++i) {
    const double rho = std::exp(log_prob_new[i] - log_prob_old[i]);
    const double clipped = std::clamp(rho, 1.0 - epsilon, 1.0 + epsilon);
    total += std::min(rho * advantage[i], clipped * advantage[i]);
  }
  return total / static_cast<double>(advantage.size());
}

double ppo_loss_gradient(const ActorCritic& net, const RolloutBatch& batch,
                         const std::vector<int>& rows, const Eigen::VectorXd& adv,
                         const PpoConfig& cfg, Eigen::VectorXd& grad) {
  const int act_dim = net.act_dim();
  const int log_std_offset = net.log_std_offset();
  const int value_offset = net.value_offset();
  const int value_params = net.value_spec().param_count();
  const Eigen::VectorXd value_block = net.params().tail(value_params);

  grad.setZero(net.params().size());
  Eigen::VectorXd gpolicy = Eigen::VectorXd::Zero(log_std_offset);
  Eigen::VectorXd gvalue = Eigen::VectorXd::Zero(value_params);

  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (const int idx : rows) {
    const Eigen::VectorXd obs = batch.observations.row(idx).transpose();
    const Eigen::VectorXd action = batch.actions.row(idx).transpose();

    MlpCache policy_cache;
    const Eigen::VectorXd mu = mlp_forward(net.policy_spec(), net.params(), obs, &policy_cache);
    double logp = 0.0, entropy = 0.0;
    Eigen::VectorXd z(act_dim), sigma(act_dim);
    std::vector<bool> clamped(act_dim);
    for (int k = 0; k < act_dim; ++k) {
      const double ls_raw = net.params()[log_std_offset + k];
      const double ls = std::clamp(ls_raw, kLogStdMin, kLogStdMax);
      clamped[k] = (ls_raw != ls);
      sigma[k] = std::exp(ls);
      z[k] = (action[k] - mu[k]) / sigma[k];
      logp += -0.5 * z[k] * z[k] - ls - kHalfLog2Pi;
      entropy += ls + kHalfLog2Pi + 0.5;
    }

    const double rho = std::exp(logp - batch.log_probs[idx]);
    const double a = adv[idx];
    const double clipped_rho = std::clamp(rho, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double surrogate = std::min(rho * a, clipped_rho * a);
    // d(min(rho A, clip(rho) A))/d(logp); the clipped branch is flat.
    const double dsur_dlogp = rho * a <= clipped_rho * a ? rho * a : 0.0;

    // Loss = -surrogate + value_coeff * 0.5 (v - R)^2 - entropy_coeff * H.
    Eigen::VectorXd dloss_dmu(act_dim);
    for (int k = 0; k < act_dim; ++k) {
      const double dlogp_dmu = z[k] / sigma[k];
      dloss_dmu[k] = -scale * dsur_dlogp * dlogp_dmu;
      if (!clamped[k]) {
        const double dlogp_dls = z[k] * z[k] - 1.0;
        grad[log_std_offset + k] += -scale * dsur_dlogp * dlogp_dls - scale * cfg.entropy_coeff;
      }
    }
    mlp_backward(net.policy_spec(), net.params(), policy_cache, dloss_dmu, gpolicy);

    MlpCache value_cache;
    const double v = mlp_forward(net.value_spec(), value_block, obs, &value_cache)[0];
    Eigen::VectorXd dloss_dv(1);
    dloss_dv[0] = scale * cfg.value_coeff * (v - batch.returns[idx]);
    mlp_backward(net.value_spec(), value_block, value_cache, dloss_dv, gvalue);

    const double dv = v - batch.returns[idx];
    loss += scale * (-surrogate + cfg.value_coeff * 0.5 * dv * dv - cfg.entropy_coeff * entropy);
  }
  grad.head(log_std_offset) = gpolicy;
  grad.segment(value_offset, value_params) = gvalue;
  return loss;
}

UpdateDiagnostics update(ActorCritic& net, Adam& optimizer, const RolloutBatch& batch,
                         const PpoConfig& cfg, Rng& rng) {
  const int n = batch.size();

  // Normalize advantages per batch (no-op direction-wise for constant batches).
  Eigen::VectorXd adv = batch.advantages;
  const double mean = adv.mean();
  adv.array() -= mean;
  const double std_dev = std::sqrt(adv.squaredNorm() / std::max(1, n));
  if (std_dev > 1e-8) adv /= std_dev;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  Eigen::VectorXd grad(net.params().size());
  std::vector<int> rows;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates shuffle from the seeded stream.
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);
    for (int start = 0; start < n; start += cfg.minibatch) {
      const int m = std::min(cfg.minibatch, n - start);
      rows.assign(order.begin() + start, order.begin() + start + m);
      ppo_loss_gradient(net, batch, rows, adv, cfg, grad);
      if (!grad.allFinite()) throw SimulationDivergedError("non-finite gradient in PPO update");
      const double norm = grad.norm();
      if (norm > cfg.grad_clip && norm > 0.0) grad *= cfg.grad_clip / norm;
      optimizer.step(net.params(), grad);
    }
  }

  UpdateDiagnostics diag;
  Eigen::VectorXd logp_new(n);
  double vloss = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd obs = batch.observations.row(i).transpose();
    logp_new[i] = net.log_prob(obs, batch.actions.row(i).transpose());
    const double dv = net.value(obs) - batch.returns[i];
    vloss += dv * dv;
  }
  diag.surrogate = clipped_surrogate(logp_new, batch.log_probs, adv, cfg.clip);
  diag.value_loss = vloss / std::max(1, n);
  diag.approx_kl = (batch.log_probs - logp_new).mean();
  if (!std::isfinite(diag.surrogate) || !std::isfinite(diag.value_loss)) {
    throw SimulationDivergedError("non-finite loss after PPO update");
  }
  return diag;
}

void save_curves_csv(const std::vector<CurvePoint>& curves, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write curves file: " + path);
  out << "iteration,env_steps,mean_return,success_rate,mean_tracking_error,level,"
         "value_loss,approx_kl\n";
  out.precision(17);
  for (const CurvePoint& c : curves) {
    out << c.iteration << "," << c.env_steps << "," << c.mean_return << "," << c.success_rate
        << "," << c.mean_tracking_error << "," << c.level << "," << c.value_loss << ","
        << c.approx_kl << "\n";
  }
}

namespace {

struct Actor {
  std::unique_ptr<Environment> env;
  Eigen::VectorXd obs;
  Rng scenario_rng{0};
  Rng action_rng{0};
  double episode_return = 0.0;
};

}  // namespace

TrainResult train(const Config& cfg, const std::function<void(const CurvePoint&)>& on_iteration) {
  const PpoConfig pc = PpoConfig::from_config(cfg);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_double("experiment.seed"));
  const double promote_rate = cfg.get_double("curriculum.promote_success_rate");
  const int promote_window = cfg.get_int("curriculum.promote_window");
  const long level_budget = static_cast<long>(cfg.get_double("curriculum.level_step_budget"));
  const Difficulty max_level = difficulty_from_string(cfg.get_string("curriculum.max_level"));

  Rng init_rng = Rng(seed).fork(0);
  Rng shuffle_rng = Rng(seed).fork(1);
  TrainResult result;
  result.net = std::make_shared<ActorCritic>(Environment::kObservationDim,
                                             Environment::kActionDim, pc.hidden,
                                             pc.log_std_init, init_rng);
  ActorCritic& net = *result.net;
  Adam optimizer(static_cast<int>(net.params().size()), pc.learning_rate);

  int level = 0;
  const int level_cap = static_cast<int>(max_level);
  std::deque<bool> success_window;
  long level_steps = 0;

  std::vector<Actor> actors(pc.actors);
  const auto fresh_env = [&](Actor& a) {
    const ScenarioConfig scenario =
        make_scenario(static_cast<Difficulty>(level), a.scenario_rng.next_u64(), cfg);
    a.env = std::make_unique<Environment>(scenario, cfg);
    a.obs = a.env->reset();
    a.episode_return = 0.0;
  };
  for (int i = 0; i < pc.actors; ++i) {
    actors[i].scenario_rng = Rng(seed).fork(100 + i);
    actors[i].action_rng = Rng(seed).fork(200 + i);
    fresh_env(actors[i]);
  }

  const int nt = pc.actors * pc.horizon;
  long steps_done = 0;
  int iteration = 0;
  Eigen::VectorXd last_good = net.params();

  while (steps_done + nt <= pc.total_steps) {
    ++iteration;
    RolloutBatch batch;
    batch.observations.resize(nt, Environment::kObservationDim);
    batch.actions.resize(nt, Environment::kActionDim);
    batch.log_probs.resize(nt);
    batch.rewards.resize(nt);
    batch.values.resize(nt);
    batch.advantages.resize(nt);
    batch.returns.resize(nt);

    int finished_episodes = 0, finished_success = 0;
    double finished_return = 0.0, finished_error = 0.0;

    int row = 0;
    for (int a = 0; a < pc.actors; ++a) {
      Actor& actor = actors[a];
      int seg_start = row;
      std::vector<double> seg_rewards, seg_values;
      const auto flush_segment = [&](double bootstrap) {
        const std::vector<double> adv =
            gae(seg_rewards, seg_values, bootstrap, pc.gamma, pc.gae_lambda);
        for (std::size_t i = 0; i < adv.size(); ++i) {
          batch.advantages[seg_start + static_cast<int>(i)] = adv[i];
          batch.returns[seg_start + static_cast<int>(i)] = adv[i] + seg_values[i];
        }
        seg_start = row;
        seg_rewards.clear();
        seg_values.clear();
      };
      for (int t = 0; t < pc.horizon; ++t) {
        double logp = 0.0;
        const Eigen::VectorXd action = net.sample_action(actor.obs, actor.action_rng, &logp);
        batch.observations.row(row) = actor.obs.transpose();
        batch.actions.row(row) = action.transpose();
        batch.log_probs[row] = logp;
        const double v = net.value(actor.obs);
        batch.values[row] = v;
        seg_values.push_back(v);
        const auto res = actor.env->step(action.head<2>());
        batch.rewards[row] = res.reward;
        seg_rewards.push_back(res.reward);
        actor.episode_return += res.reward;
        actor.obs = res.observation;
        ++row;
        if (res.done) {
          const EpisodeOutcome& outcome = actor.env->outcome();
          ++finished_episodes;
          const bool ok = outcome.status == EpisodeStatus::kSuccess;
          finished_success += ok ? 1 : 0;
          finished_return += actor.episode_return;
          finished_error += outcome.avg_tracking_error;
          success_window.push_back(ok);
          if (static_cast<int>(success_window.size()) > promote_window) {
            success_window.pop_front();
          }
          flush_segment(0.0);  // true terminal: V(s_{T+1}) = 0
          fresh_env(actor);
        }
      }
      if (!seg_rewards.empty()) flush_segment(net.value(actor.obs));
    }

    last_good = net.params();
    UpdateDiagnostics diag;
    try {
      diag = update(net, optimizer, batch, pc, shuffle_rng);
    } catch (const SimulationDivergedError&) {
      net.params() = last_good;  // keep the last good parameters
      break;
    }

    steps_done += nt;
    level_steps += nt;

    CurvePoint point;
    point.iteration = iteration;
    point.env_steps = steps_done;
    point.mean_return = finished_episodes ? finished_return / finished_episodes : 0.0;
    point.success_rate = finished_episodes
                             ? static_cast<double>(finished_success) / finished_episodes
                             : 0.0;
    point.mean_tracking_error = finished_episodes ? finished_error / finished_episodes : 0.0;
    point.level = level;
    point.value_loss = diag.value_loss;
    point.approx_kl = diag.approx_kl;
    result.curves.push_back(point);
    if (on_iteration) on_iteration(point);

    // Curriculum promotion: rolling success over the window, or budget spent.
    if (level < level_cap) {
      const bool window_full = static_cast<int>(success_window.size()) >= promote_window;
      const double rate =
          success_window.empty()
              ? 0.0
              : static_cast<double>(std::count(success_window.begin(), success_window.end(), true)) /
                    success_window.size();
      if ((window_full && rate >= promote_rate) || level_steps >= level_budget) {
        ++level;
        level_steps = 0;
        success_window.clear();
        for (Actor& actor : actors) fresh_env(actor);
      }
    }
  }
  return result;
}

}  // namespace auv
