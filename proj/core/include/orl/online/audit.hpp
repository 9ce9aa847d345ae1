#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orl/env/lander.hpp"
#include "orl/env/spaces.hpp"
#include "orl/policy.hpp"
#include "orl/random.hpp"

namespace orl {

/// Picks an action from the raw lander state. `position` keys any noise
/// features the policy reads.
using LanderController = std::function<int(const LanderState&, StreamPosition, Rng&)>;

struct AuditEpisode {
  int episode = 0;
  double episode_return = 0.0;  // undiscounted, under the audit reward
  int steps = 0;
  bool landed = false;
};

struct AuditResult {
  std::string policy_id;
  std::string reward_spec;
  std::vector<AuditEpisode> episodes;

  double mean_return() const;
  double stddev_return() const;  // population
  double landing_rate() const;
};

/// Rolls the controller out in the live environment. This is ground truth
/// for audits only; offline stages never call it.
AuditResult audit_online(const LanderController& controller, const LanderConfig& env, int episodes,
                         std::uint64_t seed, const RewardSpec& reward = reward_full());

/// Acts with the artifact's own selection rule.
AuditResult audit_online(const PolicyArtifact& policy, const LanderConfig& env, int episodes, std::uint64_t seed,
                         const RewardSpec& reward = reward_full());

std::string audit_csv(const AuditResult& result);

/// Proportional-derivative controller that lands reliably under the
/// default constants; used to check the audit path.
int scripted_lander_action(const LanderState& s, const LanderConfig& env);

}  // namespace orl
