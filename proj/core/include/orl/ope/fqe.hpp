#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orl/datastore/dataset.hpp"
#include "orl/env/spaces.hpp"
#include "orl/funcapprox/mlp.hpp"
#include "orl/policy.hpp"

namespace orl {

struct FqeConfig {
  int iterations = 50;
  int steps_per_iteration = 200;
  double gamma = 0.99;
  double step_size = 1e-4;
  int batch_size = 128;  // a batch at least the dataset size means full-batch steps
  std::vector<int> hidden = {256, 256};

  void validate() const;
  std::string canonical() const;
};

/// A fitted action-value function of one policy under one reward, reading
/// states through `context`.
struct QFunction {
  Mlp model;
  StateSpaceSpec context;
  std::string reward_spec;
  std::string policy_id;
  double scale = 1.0;  // the network predicts Q / scale
  std::vector<double> loss_trace;  // mean regression loss per iteration, in scaled units
};

/// Fitted-Q evaluation: repeated regression onto
///   y = r + gamma * continuation * sum_a pi(a|s') Q_prev(s', a)
/// with Q_prev frozen within an iteration. The evaluator reads `context`;
/// the policy acts on its own projection, which must be contained in it.
/// Rewards are divided by the dataset's largest |r| before regression.
QFunction fit_fqe(const Dataset& dataset, const PolicyArtifact& policy, const RewardSpec& reward,
                  const StateSpaceSpec& context, const FqeConfig& config, std::uint64_t seed);

/// Q-values for states projected under the function's context (actions x N).
Eigen::MatrixXd evaluate_q(const QFunction& q, const Eigen::MatrixXd& context_states);

}  // namespace orl
