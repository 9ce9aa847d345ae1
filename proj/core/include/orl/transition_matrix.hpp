#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "orl/datastore/dataset.hpp"
#include "orl/env/spaces.hpp"

namespace orl {

/// A dataset flattened into column matrices under one state projection and
/// one reward function. Columns follow dataset order.
struct ProjectedTransitions {
  Eigen::MatrixXd states;       // dim x N
  Eigen::MatrixXd next_states;  // dim x N
  std::vector<int> actions;
  Eigen::VectorXd rewards;
  Eigen::VectorXd continuation;  // 0 at true terminals, 1 otherwise (truncation bootstraps)
  Eigen::VectorXd propensities;
  std::vector<std::size_t> episode_offsets;  // episodes + 1 entries

  std::size_t size() const noexcept { return actions.size(); }
  std::size_t episode_count() const noexcept { return episode_offsets.empty() ? 0 : episode_offsets.size() - 1; }
};

/// Projects the first `episode_limit` episodes (all when 0).
ProjectedTransitions project_transitions(const Dataset& dataset, const StateSpaceSpec& spec,
                                         const RewardSpec& reward, std::size_t episode_limit = 0);

/// Episode-initial states under `spec` (dim x episodes).
Eigen::MatrixXd project_initial_states(const Dataset& dataset, const StateSpaceSpec& spec);

struct TransitionBatch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd next_states;
  std::vector<int> actions;
  Eigen::VectorXd rewards;
  Eigen::VectorXd continuation;

  std::size_t size() const noexcept { return actions.size(); }
};

TransitionBatch gather_batch(const ProjectedTransitions& data, std::span<const std::size_t> indices);

}  // namespace orl
