#include "orl/online/collect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>

#include "orl/error.hpp"
#include "orl/funcapprox/adam.hpp"
#include "orl/online/ddqn.hpp"
#include "orl/online/replay_buffer.hpp"

namespace orl {

void DdqnConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw UsageError("ddqn: gamma must lie in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw UsageError("ddqn: tau must lie in (0, 1]");
  if (!(step_size > 0.0)) throw UsageError("ddqn: step_size must be positive");
  if (batch_size <= 0) throw UsageError("ddqn: batch_size must be positive");
  if (replay_capacity < batch_size) throw UsageError("ddqn: batch_size exceeds replay capacity");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
    throw UsageError("ddqn: epsilon schedule must lie in [0, 1]");
  }
  if (epsilon_decay_steps < 0) throw UsageError("ddqn: epsilon_decay_steps must be non-negative");
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0)) {
    throw UsageError("ddqn: epsilon_decay_fraction must lie in (0, 1]");
  }
  if (episodes < 0) throw UsageError("ddqn: episodes must be non-negative");
  if (train_every <= 0) throw UsageError("ddqn: train_every must be positive");
  if (moving_average_window <= 0) throw UsageError("ddqn: moving_average_window must be positive");
  for (int h : hidden) {
    if (h <= 0) throw UsageError("ddqn: hidden layer sizes must be positive");
  }
}

double DdqnConfig::epsilon_at(std::uint64_t step) const noexcept {
  if (epsilon_decay_steps == 0) return epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(epsilon_decay_steps));
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

DdqnConfig DdqnConfig::resolved(const LanderConfig& env) const {
  DdqnConfig out = *this;
  if (out.epsilon_decay_steps == 0) {
    const double budget = static_cast<double>(episodes) * static_cast<double>(env.step_budget);
    out.epsilon_decay_steps = static_cast<int>(std::max(1.0, std::round(epsilon_decay_fraction * budget)));
  }
  return out;
}

std::string DdqnConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "gamma=" << gamma << ";step_size=" << step_size << ";batch_size=" << batch_size << ";tau=" << tau
     << ";replay_capacity=" << replay_capacity << ";epsilon=" << epsilon_start << "," << epsilon_end << ","
     << epsilon_decay_steps << "," << epsilon_decay_fraction << ";episodes=" << episodes << ";hidden=";
  for (int h : hidden) os << h << ",";
  os << ";learning_starts=" << learning_starts << ";train_every=" << train_every
     << ";avg_checkpoint_episode=" << avg_checkpoint_episode << ";window=" << moving_average_window
     << ";checkpoint_greedy=" << checkpoint_greedy;
  return os.str();
}

const Checkpoint* CollectResult::find(const std::string& label) const {
  for (const auto& c : checkpoints) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

CollectResult collect_run(const DdqnConfig& requested, const LanderConfig& env_config, std::uint64_t seed,
                          const CollectProgress& progress) {
  requested.validate();
  const DdqnConfig config = requested.resolved(env_config);
  env_config.validate();
  Lander env(env_config);
  const StateSpaceSpec observation = lander_state_original();
  const RewardSpec reward = reward_full();
  const std::size_t dim = observation.dim();

  std::vector<int> sizes{static_cast<int>(dim)};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(kLanderActionCount);
  Mlp online = Mlp::init(sizes, derive_seed(seed, "ddqn.init"));
  Mlp target = online;
  AdamConfig adam_config;
  adam_config.step_size = config.step_size;
  AdamState adam = AdamState::for_model(online, adam_config);
  ReplayBuffer replay(static_cast<std::size_t>(config.replay_capacity), dim);
  Rng explore_rng = make_rng(seed, "ddqn.explore");
  Rng replay_rng = make_rng(seed, "ddqn.replay");

  const std::string config_hash = hex64(fnv1a64(requested.canonical() + "|" + env_config.canonical()));
  auto snapshot = [&](const std::string& label, int episode, double epsilon) {
    PolicyArtifact p;
    p.id = "ddqn_" + label;
    p.q_model = online;
    p.state_spec = observation;
    p.reward_spec = reward.name;
    p.action_count = kLanderActionCount;
    p.rule = config.checkpoint_greedy ? SelectionRule::greedy() : SelectionRule::eps_greedy(epsilon);
    p.config_hash = config_hash;
    p.seed = seed;
    return Checkpoint{label, episode, 0.0, std::move(p)};
  };

  CollectResult result;
  result.dataset.header.feature_names = lander_feature_names();
  result.dataset.header.action_count = kLanderActionCount;
  result.dataset.header.env_config_hash = env_config.hash();
  result.dataset.header.collection_seed = seed;

  std::uint64_t global_step = 0;
  result.checkpoints.push_back(snapshot("random", 0, config.epsilon_at(0)));
  std::deque<double> window;
  double window_sum = 0.0;
  std::optional<Checkpoint> best;

  const auto learning_starts = static_cast<std::size_t>(std::max(config.learning_starts, config.batch_size));
  for (int e = 0; e < config.episodes; ++e) {
    Episode episode;
    episode.id = e;
    LanderState s = env.reset(derive_seed(seed, static_cast<std::uint64_t>(e)));
    std::vector<double> sv = s.to_vector();
    double ep_return = 0.0;
    bool landed = false;
    while (!env.done()) {
      const double eps = config.epsilon_at(global_step);
      const Eigen::VectorXd q = online.forward(sv);
      const auto [action, propensity] =
          epsilon_greedy(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), eps, explore_rng);
      const LanderStep step = env.step(action);
      std::vector<double> next = step.state.to_vector();

      Transition tr;
      tr.episode_id = e;
      tr.t = static_cast<std::int64_t>(episode.steps.size());
      tr.state = sv;
      tr.action = action;
      tr.reward = step.reward;
      tr.next_state = next;
      tr.done = step.done;
      tr.truncated = step.truncated;
      tr.propensity = propensity;
      const double r = apply_reward_spec(step.reward, reward);
      ep_return += r;
      landed = step.landed;
      replay.push(sv, action, r, next, tr.true_terminal() ? 0.0 : 1.0);
      episode.steps.push_back(std::move(tr));
      ++global_step;

      if (replay.size() >= learning_starts && global_step % static_cast<std::uint64_t>(config.train_every) == 0) {
        const TransitionBatch batch = replay.sample(static_cast<std::size_t>(config.batch_size), replay_rng);
        const LossAndGradients lg = ddqn_update(online, target, batch, config.gamma);
        if (!std::isfinite(lg.loss)) throw NumericalError("ddqn loss became non-finite");
        adam_step(online, lg.grads, adam);
        soft_update(target, online, config.tau);
      }
      sv = std::move(next);
    }

    const int completed = e + 1;
    window.push_back(ep_return);
    window_sum += ep_return;
    if (static_cast<int>(window.size()) > config.moving_average_window) {
      window_sum -= window.front();
      window.pop_front();
    }
    const double moving_average = window_sum / static_cast<double>(window.size());
    CurvePoint point{completed, ep_return, moving_average, static_cast<int>(episode.steps.size()), landed};
    result.curve.push_back(point);
    result.dataset.episodes.push_back(std::move(episode));
    if (progress) progress(point);

    const double eps_now = config.epsilon_at(global_step);
    if (completed == config.avg_checkpoint_episode) {
      result.checkpoints.push_back(snapshot("avg", completed, eps_now));
      result.checkpoints.back().moving_average = moving_average;
    }
    const bool eligible = completed >= std::min(config.moving_average_window, config.episodes);
    if (eligible && (!best || moving_average > best->moving_average)) {
      best = snapshot("best", completed, eps_now);
      best->moving_average = moving_average;
    }
  }
  if (best) result.checkpoints.push_back(std::move(*best));
  result.dataset.sync_counts();
  return result;
}

}  // namespace orl
