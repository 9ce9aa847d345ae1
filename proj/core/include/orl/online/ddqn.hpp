#pragma once

#include <Eigen/Dense>

#include "orl/funcapprox/mlp.hpp"
#include "orl/transition_matrix.hpp"

namespace orl {

/// y = r + gamma * continuation * Q_target(s', argmax_a Q_online(s', a)).
Eigen::VectorXd double_q_targets(const Mlp& online, const Mlp& target, const TransitionBatch& batch, double gamma);

/// Squared error on the taken action against double-Q targets:
/// loss = 1/(2B) sum_b (Q(s_b, a_b) - y_b)^2.
LossAndGradients ddqn_update(const Mlp& online, const Mlp& target, const TransitionBatch& batch, double gamma);

}  // namespace orl
