#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "orl/datastore/dataset.hpp"
#include "orl/random.hpp"

namespace orl {

/// Finite MDP used as an exact oracle for the estimators. Terminal states are
/// absorbing with zero value; entering one ends an episode.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> transition;  // P(s'|s,a) at [(s * n_actions + a) * n_states + s']
  Eigen::MatrixXd reward;  // n_states x n_actions
  Eigen::VectorXd initial_dist;
  std::vector<int> terminal_states;

  double p(int s, int a, int next) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + next];
  }
  double& p(int s, int a, int next) {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + next];
  }
  bool is_terminal(int s) const;

  /// Throws ValidationError unless rows and the initial distribution sum to 1
  /// within 1e-12.
  void validate() const;
};

/// Policy as an action-distribution table (n_states x n_actions).
using PolicyTable = Eigen::MatrixXd;

/// V solving (I - gamma P_pi) V = r_pi with terminal values pinned to zero.
Eigen::VectorXd exact_state_values(const TabularMdp& mdp, const PolicyTable& policy, double gamma);
Eigen::MatrixXd exact_q_values(const TabularMdp& mdp, const PolicyTable& policy, double gamma);
/// initial_dist . V
double exact_policy_value(const TabularMdp& mdp, const PolicyTable& policy, double gamma);

/// Random MDP with `n_states - 1` live states and one terminal state (the
/// last). Every live (s, a) terminates with probability in
/// [min_termination, 2 * min_termination]; rewards lie in [reward_lo, reward_hi].
TabularMdp random_tabular_mdp(int n_states, int n_actions, Rng& rng, double min_termination = 0.15,
                              double reward_lo = 0.5, double reward_hi = 1.5);

/// Logs `episodes` rollouts of `behavior`, rendering states as one-hot
/// features. Rewards are stored in the state-based component. Episodes reaching
/// `max_steps` are truncated.
Dataset tabular_dataset(const TabularMdp& mdp, const PolicyTable& behavior, int episodes,
                        std::uint64_t seed, int max_steps = 200);

std::vector<double> one_hot(int index, int size);

}  // namespace orl
