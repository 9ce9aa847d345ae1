#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orl/datastore/dataset.hpp"
#include "orl/env/lander.hpp"
#include "orl/policy.hpp"

namespace orl {

struct DdqnConfig {
  double gamma = 0.99;
  double step_size = 5e-5;
  int batch_size = 128;
  double tau = 0.01;
  int replay_capacity = 100000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  // Linear decay over this many environment steps; 0 means the fraction
  // below of the step budget (episodes x env step budget).
  int epsilon_decay_steps = 0;
  double epsilon_decay_fraction = 0.2;
  int episodes = 1000;
  std::vector<int> hidden = {256, 256};
  int learning_starts = 1000;  // transitions logged before the first update
  int train_every = 1;  // environment steps per gradient update
  int avg_checkpoint_episode = 100;
  int moving_average_window = 100;
  /// Checkpoints carry the behavior rule in force when they were taken
  /// (epsilon-greedy with the scheduled epsilon) unless set to greedy.
  bool checkpoint_greedy = false;

  void validate() const;
  double epsilon_at(std::uint64_t step) const noexcept;
  /// Copy with epsilon_decay_steps resolved against the environment budget.
  DdqnConfig resolved(const LanderConfig& env) const;
  std::string canonical() const;
};

struct Checkpoint {
  std::string label;  // "random", "avg", "best"
  int episode = 0;  // episodes completed when taken
  double moving_average = 0.0;
  PolicyArtifact policy;
};

struct CurvePoint {
  int episode = 0;  // 1-based
  double episode_return = 0.0;  // undiscounted composite reward
  double moving_average = 0.0;
  int steps = 0;
  bool landed = false;
};

struct CollectResult {
  Dataset dataset;
  std::vector<Checkpoint> checkpoints;
  std::vector<CurvePoint> curve;

  const Checkpoint* find(const std::string& label) const;
};

using CollectProgress = std::function<void(const CurvePoint&)>;

/// Trains a double DQN on the lander with the composite reward, logging every
/// transition with its behavior propensity. The agent observes the full
/// eight-feature state.
CollectResult collect_run(const DdqnConfig& config, const LanderConfig& env, std::uint64_t seed,
                          const CollectProgress& progress = {});

}  // namespace orl
