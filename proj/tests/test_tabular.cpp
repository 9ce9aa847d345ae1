#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "orl/env/tabular.hpp"
#include "orl/error.hpp"

using orl::TabularMdp;

namespace {

// Independent Monte-Carlo oracle: discounted returns of sampled rollouts.
struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

McEstimate monte_carlo(const TabularMdp& m, const Eigen::MatrixXd& pi, double gamma, int episodes,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](auto&& prob, int n) {
    double x = u(rng);
    for (int i = 0; i < n - 1; ++i) {
      x -= prob(i);
      if (x < 0.0) return i;
    }
    return n - 1;
  };
  double sum = 0.0;
  double sq = 0.0;
  for (int e = 0; e < episodes; ++e) {
    int s = draw([&](int i) { return m.initial_dist(i); }, m.n_states);
    double g = 0.0;
    double disc = 1.0;
    while (!m.is_terminal(s) && disc > 1e-12) {
      const int a = draw([&](int i) { return pi(s, i); }, m.n_actions);
      g += disc * m.reward(s, a);
      disc *= gamma;
      s = draw([&](int i) { return m.p(s, a, i); }, m.n_states);
    }
    sum += g;
    sq += g * g;
  }
  const double mean = sum / episodes;
  const double var = sq / episodes - mean * mean;
  return {mean, std::sqrt(var / episodes)};
}

TabularMdp chain3() {
  // 0 -> 1 -> 2 (terminal), with slips back to 0.
  TabularMdp m;
  m.n_states = 3;
  m.n_actions = 2;
  m.transition.assign(3 * 2 * 3, 0.0);
  m.p(0, 0, 0) = 0.7;
  m.p(0, 0, 1) = 0.3;
  m.p(0, 1, 1) = 0.8;
  m.p(0, 1, 2) = 0.2;
  m.p(1, 0, 2) = 0.6;
  m.p(1, 0, 0) = 0.4;
  m.p(1, 1, 1) = 0.5;
  m.p(1, 1, 2) = 0.5;
  m.p(2, 0, 2) = 1.0;
  m.p(2, 1, 2) = 1.0;
  m.reward = Eigen::MatrixXd(3, 2);
  m.reward << 1.0, -0.5, 2.0, 0.25, 0.0, 0.0;
  m.initial_dist = Eigen::Vector3d(1.0, 0.0, 0.0);
  m.terminal_states = {2};
  return m;
}

}  // namespace

TEST_CASE("single absorbing state with zero reward has value zero") {
  TabularMdp m;
  m.n_states = 1;
  m.n_actions = 1;
  m.transition = {1.0};
  m.reward = Eigen::MatrixXd::Zero(1, 1);
  m.initial_dist = Eigen::VectorXd::Ones(1);
  m.terminal_states = {0};
  CHECK(orl::exact_policy_value(m, Eigen::MatrixXd::Ones(1, 1), 0.9) == 0.0);
}

TEST_CASE("one-state loop with r=1 and gamma=0.5 has value 2") {
  TabularMdp m;
  m.n_states = 1;
  m.n_actions = 1;
  m.transition = {1.0};
  m.reward = Eigen::MatrixXd::Ones(1, 1);
  m.initial_dist = Eigen::VectorXd::Ones(1);
  CHECK(orl::exact_policy_value(m, Eigen::MatrixXd::Ones(1, 1), 0.5) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("three-state chain: linear solve agrees with a Monte-Carlo rollout") {
  const TabularMdp m = chain3();
  Eigen::MatrixXd pi(3, 2);
  pi << 0.3, 0.7, 0.6, 0.4, 0.5, 0.5;
  const double exact = orl::exact_policy_value(m, pi, 0.9);
  const McEstimate mc = monte_carlo(m, pi, 0.9, 300000, 1);
  CHECK(std::abs(mc.mean - exact) < 3.0 * mc.stderr_);
  // Hand check of the Bellman system at the solution.
  const Eigen::VectorXd v = orl::exact_state_values(m, pi, 0.9);
  CHECK(v(2) == 0.0);
  for (int s = 0; s < 2; ++s) {
    double rhs = 0.0;
    for (int a = 0; a < 2; ++a) {
      double next = 0.0;
      for (int t = 0; t < 3; ++t) next += m.p(s, a, t) * v(t);
      rhs += pi(s, a) * (m.reward(s, a) + 0.9 * next);
    }
    CHECK(v(s) == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("exact Q-values are consistent with state values") {
  const TabularMdp m = chain3();
  Eigen::MatrixXd pi(3, 2);
  pi << 1.0, 0.0, 0.2, 0.8, 0.5, 0.5;
  const Eigen::VectorXd v = orl::exact_state_values(m, pi, 0.9);
  const Eigen::MatrixXd q = orl::exact_q_values(m, pi, 0.9);
  for (int s = 0; s < 2; ++s) CHECK((pi.row(s) * q.row(s).transpose())(0) == doctest::Approx(v(s)));
}

TEST_CASE("random tabular MDPs agree with Monte-Carlo within 3 standard errors") {
  orl::Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 5;
    const TabularMdp m = orl::random_tabular_mdp(n, 2 + trial % 2, rng);
    CHECK_NOTHROW(m.validate());
    Eigen::MatrixXd pi = Eigen::MatrixXd::Constant(m.n_states, m.n_actions, 1.0 / m.n_actions);
    const double exact = orl::exact_policy_value(m, pi, 0.9);
    const McEstimate mc = monte_carlo(m, pi, 0.9, 100000, 100 + static_cast<std::uint64_t>(trial));
    CHECK(std::abs(mc.mean - exact) < 3.0 * mc.stderr_ + 1e-9);
  }
}

TEST_CASE("validation rejects malformed tables") {
  TabularMdp m = chain3();
  m.p(0, 0, 0) = 0.5;
  CHECK_THROWS_AS(m.validate(), orl::ValidationError);
  m = chain3();
  m.initial_dist(0) = 0.9;
  CHECK_THROWS_AS(m.validate(), orl::ValidationError);
}

TEST_CASE("tabular datasets log one-hot states and behavior propensities") {
  const TabularMdp m = chain3();
  Eigen::MatrixXd mu = Eigen::MatrixXd::Constant(3, 2, 0.5);
  const orl::Dataset d = orl::tabular_dataset(m, mu, 200, 4);
  CHECK(d.episodes.size() == 200);
  CHECK(d.union_dim() == 3);
  for (const auto& ep : d.episodes) {
    REQUIRE_FALSE(ep.steps.empty());
    CHECK(ep.steps.back().done);
    for (const auto& t : ep.steps) {
      CHECK(t.propensity == 0.5);
      double sum = 0.0;
      for (double x : t.state) sum += x;
      CHECK(sum == 1.0);
      const int s = static_cast<int>(std::max_element(t.state.begin(), t.state.end()) - t.state.begin());
      CHECK(t.reward.state_based == m.reward(s, t.action));
    }
  }
}
