#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orl/datastore/dataset.hpp"
#include "orl/env/spaces.hpp"
#include "orl/funcapprox/mlp.hpp"
#include "orl/policy.hpp"
#include "orl/transition_matrix.hpp"

namespace orl {

struct CqlConfig {
  double alpha = 1.0;
  double gamma = 0.99;
  double step_size = 5e-5;
  int batch_size = 128;
  int gradient_steps = 10000;
  double tau = 0.01;
  double dataset_fraction = 1.0;  // leading fraction of episodes used for training
  std::vector<int> hidden = {256, 256};

  void validate() const;
  std::string canonical() const;
};

/// Discrete conservative Q-learning objective on one batch:
///   1/(2B) sum (Q(s,a) - y)^2 + alpha/B sum [logsumexp_a' Q(s,a') - Q(s,a)]
/// with double-Q targets y.
LossAndGradients cql_loss(const Mlp& online, const Mlp& target, const TransitionBatch& batch, double gamma,
                          double alpha);

/// Mean over `states` of logsumexp_a Q(s,a) - Q(s, a_logged).
double conservative_gap(const Mlp& model, const Eigen::MatrixXd& states, const std::vector<int>& actions);

/// Number of leading episodes used for a fraction: ceil(fraction * episodes), at least 1.
std::size_t fraction_episode_count(std::size_t episodes, double fraction);

/// Trains a greedy policy from logged data only. Deterministic per seed.
/// Rewards are divided by their largest magnitude in the training subset, so
/// the artifact's Q-values are in those units.
PolicyArtifact train_cql(const Dataset& dataset, const StateSpaceSpec& state_spec, const RewardSpec& reward_spec,
                         const CqlConfig& config, std::uint64_t seed, std::string id = {});

}  // namespace orl
