#include <array>
#include <map>

#include "doctest.h"
#include "orl/error.hpp"
#include "orl/policy.hpp"
#include "test_util.hpp"

namespace {

orl::PolicyArtifact small_policy(orl::SelectionRule rule) {
  orl::PolicyArtifact p;
  p.id = "p";
  p.q_model = orl::Mlp::init({8, 6, 4}, 3);
  p.state_spec = orl::lander_state_original();
  p.reward_spec = "f";
  p.action_count = 4;
  p.rule = rule;
  p.config_hash = "abc";
  p.seed = 9;
  return p;
}

}  // namespace

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(orl::argmax_lowest(std::array{1.0, 3.0, 3.0, 2.0}) == 1);
  CHECK(orl::argmax_lowest(std::array{0.0, 0.0, 0.0}) == 0);
  CHECK(orl::argmax_lowest(std::array{-1.0}) == 0);
  CHECK_THROWS_AS(orl::argmax_lowest(std::span<const double>{}), orl::UsageError);
}

TEST_CASE("epsilon-greedy reports the exact probability of its draw") {
  const std::array q{0.5, 2.0, 2.0, -1.0};
  orl::Rng rng(1);
  std::map<int, int> counts;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto [a, p] = orl::epsilon_greedy(q, 0.2, rng);
    ++counts[a];
    CHECK(p == (a == 1 ? 0.05 + 0.8 : 0.05));
  }
  CHECK(std::abs(counts[1] / double(n) - 0.85) < 0.005);
  CHECK(std::abs(counts[2] / double(n) - 0.05) < 0.003);
  const auto [greedy, p1] = orl::epsilon_greedy(q, 0.0, rng);
  CHECK(greedy == 1);
  CHECK(p1 == 1.0);
  CHECK_THROWS_AS(orl::epsilon_greedy(q, 1.5, rng), orl::UsageError);
}

TEST_CASE("action probabilities sum to one and match the rule") {
  orl::Rng rng(2);
  std::normal_distribution<double> n;
  for (const auto rule : {orl::SelectionRule::greedy(), orl::SelectionRule::eps_greedy(0.1)}) {
    const auto p = small_policy(rule);
    Eigen::MatrixXd states(8, 25);
    for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = n(rng);
    const Eigen::MatrixXd probs = p.probabilities_batch(states);
    for (int j = 0; j < 25; ++j) {
      CHECK(probs.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
      const Eigen::VectorXd col = states.col(j);
      const std::span<const double> s(col.data(), 8);
      const auto single = p.probabilities(s);
      const int g = p.greedy_action(s);
      for (int a = 0; a < 4; ++a) {
        CHECK(single[static_cast<std::size_t>(a)] == probs(a, j));
        const double expected = rule.kind == orl::SelectionRule::Kind::greedy ? (a == g ? 1.0 : 0.0)
                                                                               : 0.025 + (a == g ? 0.9 : 0.0);
        CHECK(probs(a, j) == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("policy artifacts round trip through sidecar and model files") {
  testutil::TempDir dir("policy");
  const auto p = small_policy(orl::SelectionRule::eps_greedy(0.05));
  orl::save_policy(dir / "p.json", p);
  CHECK(std::filesystem::exists(dir / "p.mlp"));
  const auto back = orl::load_policy(dir / "p.json");
  CHECK(back == p);
  CHECK(orl::policy_sidecar(back, "p.mlp") == orl::policy_sidecar(p, "p.mlp"));
  CHECK_THROWS_AS(orl::load_policy(dir / "nope.json"), orl::IoError);
}

TEST_CASE("shape mismatches are validation errors") {
  auto p = small_policy(orl::SelectionRule::greedy());
  CHECK_NOTHROW(p.validate());
  p.state_spec = orl::lander_state_less();
  CHECK_THROWS_AS(p.validate(), orl::ValidationError);
  p = small_policy(orl::SelectionRule::greedy());
  p.action_count = 3;
  CHECK_THROWS_AS(p.validate(), orl::ValidationError);
}

TEST_CASE("union wrappers project before acting") {
  auto p = small_policy(orl::SelectionRule::greedy());
  p.q_model = orl::Mlp::init({6, 5, 4}, 4);
  p.state_spec = orl::lander_state_less();
  const std::vector<double> u{9, 9, 0.1, 0.2, 0.3, 0.4, 1, 0};
  const std::vector<double> projected{0.1, 0.2, 0.3, 0.4, 1, 0};
  CHECK(p.greedy_action_union(u, {0, 0}) == p.greedy_action(projected));
  CHECK(p.probabilities_union(u, {0, 0}) == p.probabilities(projected));
}
