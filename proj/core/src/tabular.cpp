#include "orl/env/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orl/error.hpp"

namespace orl {

bool TabularMdp::is_terminal(int s) const {
  return std::find(terminal_states.begin(), terminal_states.end(), s) != terminal_states.end();
}

void TabularMdp::validate() const {
  if (n_states <= 0 || n_actions <= 0) throw ValidationError("tabular MDP needs states and actions");
  if (transition.size() != static_cast<std::size_t>(n_states) * n_actions * n_states) {
    throw ValidationError("tabular MDP transition table has the wrong size");
  }
  if (reward.rows() != n_states || reward.cols() != n_actions) {
    throw ValidationError("tabular MDP reward table has the wrong shape");
  }
  if (initial_dist.size() != n_states) throw ValidationError("tabular MDP initial distribution has the wrong size");
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (int n = 0; n < n_states; ++n) {
        if (p(s, a, n) < 0.0) throw ValidationError("tabular MDP has a negative transition probability");
        sum += p(s, a, n);
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw ValidationError("tabular MDP row (" + std::to_string(s) + ", " + std::to_string(a) +
                              ") does not sum to 1");
      }
    }
  }
  if (std::abs(initial_dist.sum() - 1.0) > 1e-12 || initial_dist.minCoeff() < 0.0) {
    throw ValidationError("tabular MDP initial distribution does not sum to 1");
  }
  for (int t : terminal_states) {
    if (t < 0 || t >= n_states) throw ValidationError("tabular MDP terminal state out of range");
  }
}

namespace {

void check_policy(const TabularMdp& mdp, const PolicyTable& policy, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw UsageError("exact policy value requires 0 <= gamma < 1");
  if (policy.rows() != mdp.n_states || policy.cols() != mdp.n_actions) {
    throw UsageError("policy table shape does not match the MDP");
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    if (std::abs(policy.row(s).sum() - 1.0) > 1e-9 || policy.row(s).minCoeff() < 0.0) {
      throw UsageError("policy row " + std::to_string(s) + " is not a distribution");
    }
  }
}

}  // namespace

Eigen::VectorXd exact_state_values(const TabularMdp& mdp, const PolicyTable& policy, double gamma) {
  mdp.validate();
  check_policy(mdp, policy, gamma);
  const int n = mdp.n_states;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int act = 0; act < mdp.n_actions; ++act) {
      const double pa = policy(s, act);
      b(s) += pa * mdp.reward(s, act);
      for (int next = 0; next < n; ++next) a(s, next) -= gamma * pa * mdp.p(s, act, next);
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd v = lu.solve(b);
  const double residual = (a * v - b).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-10 * std::max(1.0, b.lpNorm<Eigen::Infinity>()))) {
    throw NumericalError("policy evaluation linear solve residual " + std::to_string(residual));
  }
  return v;
}

Eigen::MatrixXd exact_q_values(const TabularMdp& mdp, const PolicyTable& policy, double gamma) {
  const Eigen::VectorXd v = exact_state_values(mdp, policy, gamma);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.n_actions; ++a) {
      double next = 0.0;
      for (int n = 0; n < mdp.n_states; ++n) next += mdp.p(s, a, n) * v(n);
      q(s, a) = mdp.reward(s, a) + gamma * next;
    }
  }
  return q;
}

double exact_policy_value(const TabularMdp& mdp, const PolicyTable& policy, double gamma) {
  return mdp.initial_dist.dot(exact_state_values(mdp, policy, gamma));
}

TabularMdp random_tabular_mdp(int n_states, int n_actions, Rng& rng, double min_termination, double reward_lo,
                              double reward_hi) {
  if (n_states < 2 || n_actions < 1) throw UsageError("random tabular MDP needs >= 2 states and >= 1 action");
  TabularMdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.transition.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
  m.reward = Eigen::MatrixXd::Zero(n_states, n_actions);
  m.initial_dist = Eigen::VectorXd::Zero(n_states);
  const int terminal = n_states - 1;
  m.terminal_states = {terminal};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      if (s == terminal) {
        m.p(s, a, terminal) = 1.0;
        continue;
      }
      const double stop = min_termination * (1.0 + unit(rng));
      std::vector<double> w(static_cast<std::size_t>(terminal));
      double total = 0.0;
      for (auto& x : w) total += (x = unit(rng) + 0.05);
      double assigned = 0.0;
      for (int n = 0; n + 1 < terminal; ++n) {
        m.p(s, a, n) = (1.0 - stop) * w[static_cast<std::size_t>(n)] / total;
        assigned += m.p(s, a, n);
      }
      // Remaining live mass goes to the last live state so rows sum exactly.
      m.p(s, a, terminal - 1) = 1.0 - stop - assigned;
      m.p(s, a, terminal) = stop;
      m.reward(s, a) = reward_lo + (reward_hi - reward_lo) * unit(rng);
    }
  }
  double total = 0.0;
  for (int s = 0; s < terminal; ++s) total += (m.initial_dist(s) = unit(rng) + 0.1);
  m.initial_dist /= total;
  // Renormalize rows in long double to land within 1e-12 of one.
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      long double sum = 0.0L;
      for (int n = 0; n < n_states; ++n) sum += m.p(s, a, n);
      for (int n = 0; n < n_states; ++n) m.p(s, a, n) = static_cast<double>(m.p(s, a, n) / sum);
    }
  }
  m.validate();
  return m;
}

std::vector<double> one_hot(int index, int size) {
  std::vector<double> v(static_cast<std::size_t>(size), 0.0);
  v.at(static_cast<std::size_t>(index)) = 1.0;
  return v;
}

namespace {

int draw(const double* probs, int count, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  for (int i = count - 1; i >= 0; --i) {
    if (probs[i] > 0.0) return i;
  }
  return count - 1;
}

}  // namespace

Dataset tabular_dataset(const TabularMdp& mdp, const PolicyTable& behavior, int episodes, std::uint64_t seed,
                        int max_steps) {
  mdp.validate();
  if (behavior.rows() != mdp.n_states || behavior.cols() != mdp.n_actions) {
    throw UsageError("behavior table shape does not match the MDP");
  }
  Dataset ds;
  ds.header.action_count = mdp.n_actions;
  for (int s = 0; s < mdp.n_states; ++s) ds.header.feature_names.push_back("s" + std::to_string(s));
  ds.header.env_config_hash = "tabular";
  ds.header.collection_seed = seed;
  Rng rng = make_rng(seed, "tabular.rollout");
  std::vector<double> row(static_cast<std::size_t>(mdp.n_actions));
  std::vector<double> next_probs(static_cast<std::size_t>(mdp.n_states));
  for (int e = 0; e < episodes; ++e) {
    Episode ep;
    ep.id = e;
    int s = draw(mdp.initial_dist.data(), mdp.n_states, rng);
    for (int t = 0; t < max_steps; ++t) {
      for (int a = 0; a < mdp.n_actions; ++a) row[static_cast<std::size_t>(a)] = behavior(s, a);
      const int a = draw(row.data(), mdp.n_actions, rng);
      for (int n = 0; n < mdp.n_states; ++n) next_probs[static_cast<std::size_t>(n)] = mdp.p(s, a, n);
      const int next = draw(next_probs.data(), mdp.n_states, rng);
      Transition tr;
      tr.episode_id = e;
      tr.t = t;
      tr.state = one_hot(s, mdp.n_states);
      tr.action = a;
      tr.reward.state_based = mdp.reward(s, a);
      tr.next_state = one_hot(next, mdp.n_states);
      tr.done = mdp.is_terminal(next) || t + 1 == max_steps;
      tr.truncated = !mdp.is_terminal(next) && t + 1 == max_steps;
      tr.propensity = behavior(s, a);
      ep.steps.push_back(std::move(tr));
      if (ep.steps.back().done) break;
      s = next;
    }
    ds.episodes.push_back(std::move(ep));
  }
  ds.sync_counts();
  return ds;
}

}  // namespace orl
