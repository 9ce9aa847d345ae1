#include "orl/online/audit.hpp"

#include <algorithm>
#include <cmath>

#include "orl/error.hpp"
#include "orl/util/format.hpp"

namespace orl {

double AuditResult::mean_return() const {
  if (episodes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : episodes) s += e.episode_return;
  return s / static_cast<double>(episodes.size());
}

double AuditResult::stddev_return() const {
  if (episodes.empty()) return 0.0;
  const double m = mean_return();
  double s = 0.0;
  for (const auto& e : episodes) s += (e.episode_return - m) * (e.episode_return - m);
  return std::sqrt(s / static_cast<double>(episodes.size()));
}

double AuditResult::landing_rate() const {
  if (episodes.empty()) return 0.0;
  double n = 0.0;
  for (const auto& e : episodes) n += e.landed ? 1.0 : 0.0;
  return n / static_cast<double>(episodes.size());
}

AuditResult audit_online(const LanderController& controller, const LanderConfig& env_config, int episodes,
                         std::uint64_t seed, const RewardSpec& reward) {
  if (episodes <= 0) throw UsageError("audit needs a positive episode count");
  Lander env(env_config);
  Rng rng = make_rng(seed, "audit.act");
  AuditResult out;
  out.reward_spec = reward.name;
  for (int e = 0; e < episodes; ++e) {
    AuditEpisode ep;
    ep.episode = e;
    LanderState s = env.reset(derive_seed(derive_seed(seed, "audit.spawn"), static_cast<std::uint64_t>(e)));
    while (!env.done()) {
      const int a = controller(s, StreamPosition{e, ep.steps}, rng);
      const LanderStep step = env.step(a);
      ep.episode_return += apply_reward_spec(step.reward, reward);
      ep.landed = step.landed;
      s = step.state;
      ++ep.steps;
    }
    out.episodes.push_back(ep);
  }
  return out;
}

AuditResult audit_online(const PolicyArtifact& policy, const LanderConfig& env, int episodes, std::uint64_t seed,
                         const RewardSpec& reward) {
  policy.validate();
  std::vector<double> x(policy.state_spec.dim());
  auto controller = [&](const LanderState& s, StreamPosition pos, Rng& rng) {
    const std::vector<double> u = s.to_vector();
    project_state_into(u, policy.state_spec, pos, x);
    const Eigen::VectorXd q = policy.q_model.forward(x);
    const std::span<const double> qs(q.data(), static_cast<std::size_t>(q.size()));
    if (policy.rule.kind == SelectionRule::Kind::greedy) return argmax_lowest(qs);
    return epsilon_greedy(qs, policy.rule.epsilon, rng).first;
  };
  AuditResult r = audit_online(controller, env, episodes, seed, reward);
  r.policy_id = policy.id;
  return r;
}

std::string audit_csv(const AuditResult& result) {
  std::string out = "episode,return,steps,landed\n";
  for (const auto& e : result.episodes) {
    out += std::to_string(e.episode) + ',' + format_double(e.episode_return) + ',' + std::to_string(e.steps) + ',' +
           (e.landed ? "1" : "0") + "\n";
  }
  return out;
}

int scripted_lander_action(const LanderState& s, const LanderConfig& env) {
  (void)env;
  const double target_vy = -0.1 - 0.3 * std::max(0.0, s.y);
  if (s.vy < target_vy) return static_cast<int>(LanderAction::main);
  const double drift = s.x + 1.0 * s.vx + 0.5 * s.theta;
  if (drift > 0.05) return static_cast<int>(LanderAction::left);
  if (drift < -0.05) return static_cast<int>(LanderAction::right);
  return static_cast<int>(LanderAction::noop);
}

}  // namespace orl
