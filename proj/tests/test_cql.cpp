#include <cmath>

#include "doctest.h"
#include "orl/error.hpp"
#include "orl/offline/cql.hpp"
#include "orl/online/ddqn.hpp"
#include "test_util.hpp"

namespace {

orl::TransitionBatch random_batch(int dim, int n, int actions, std::uint64_t seed) {
  orl::Rng rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> a(0, actions - 1);
  orl::TransitionBatch b;
  b.states.resize(dim, n);
  b.next_states.resize(dim, n);
  for (Eigen::Index i = 0; i < b.states.size(); ++i) {
    b.states.data()[i] = g(rng);
    b.next_states.data()[i] = g(rng);
  }
  for (int j = 0; j < n; ++j) b.actions.push_back(a(rng));
  b.rewards = Eigen::VectorXd::NullaryExpr(n, [&] { return g(rng); });
  b.continuation = Eigen::VectorXd::Ones(n);
  b.continuation(0) = 0.0;
  return b;
}

orl::CqlConfig small_cql() {
  orl::CqlConfig c;
  c.hidden = {16};
  c.batch_size = 32;
  c.gradient_steps = 300;
  c.step_size = 1e-3;
  c.gamma = 0.9;
  return c;
}

orl::StateSpaceSpec all_features(int dim) {
  orl::StateSpaceSpec s{"all", {}, 0, "noise"};
  for (int i = 0; i < dim; ++i) s.indices.push_back(i);
  return s;
}

}  // namespace

TEST_CASE("alpha = 0 reduces to the double-Q regression") {
  const orl::Mlp online = orl::Mlp::init({3, 8, 4}, 1);
  const orl::Mlp target = orl::Mlp::init({3, 8, 4}, 2);
  const auto b = random_batch(3, 20, 4, 3);
  const auto c = orl::cql_loss(online, target, b, 0.95, 0.0);
  const auto d = orl::ddqn_update(online, target, b, 0.95);
  CHECK(c.loss == d.loss);
  for (std::size_t l = 0; l < online.layer_count(); ++l) {
    CHECK(c.grads.weights[l] == d.grads.weights[l]);
    CHECK(c.grads.biases[l] == d.grads.biases[l]);
  }
}

TEST_CASE("the penalty of a constant network is ln |A|") {
  const orl::Mlp zero = orl::Mlp::zeros({2, 5});
  const Eigen::MatrixXd states = Eigen::MatrixXd::Random(2, 9);
  const std::vector<int> actions{0, 1, 2, 3, 4, 0, 1, 2, 3};
  CHECK(orl::conservative_gap(zero, states, actions) == doctest::Approx(std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("hand-worked single transition") {
  // Q(s) = bias = (1, 2, 0) for every state; target net is zero.
  orl::Mlp online = orl::Mlp::zeros({1, 3});
  online.bias(0) << 1.0, 2.0, 0.0;
  const orl::Mlp target = orl::Mlp::zeros({1, 3});
  orl::TransitionBatch b;
  b.states = Eigen::MatrixXd::Zero(1, 1);
  b.next_states = Eigen::MatrixXd::Zero(1, 1);
  b.actions = {0};
  b.rewards = Eigen::VectorXd::Constant(1, 0.5);
  b.continuation = Eigen::VectorXd::Ones(1);
  const double lse = std::log(std::exp(1.0) + std::exp(2.0) + 1.0);
  const double expected = 0.5 * 0.5 * 0.5 + 2.0 * (lse - 1.0);
  const auto lg = orl::cql_loss(online, target, b, 0.9, 2.0);
  CHECK(lg.loss == doctest::Approx(expected).epsilon(1e-14));
  // d/db_a = err * [a == 0] + alpha * (softmax_a - [a == 0])
  const double z = std::exp(1.0) + std::exp(2.0) + 1.0;
  CHECK(lg.grads.biases[0](0) == doctest::Approx(0.5 + 2.0 * (std::exp(1.0) / z - 1.0)));
  CHECK(lg.grads.biases[0](1) == doctest::Approx(2.0 * std::exp(2.0) / z));
  CHECK(lg.grads.biases[0](2) == doctest::Approx(2.0 / z));
}

TEST_CASE("penalty gradient matches finite differences") {
  orl::Mlp online = orl::Mlp::init({3, 6, 4}, 5);
  for (std::size_t l = 0; l < online.layer_count(); ++l) online.bias(l).setConstant(0.03);
  const orl::Mlp target = orl::Mlp::init({3, 6, 4}, 6);
  const auto b = random_batch(3, 10, 4, 7);
  const auto lg = orl::cql_loss(online, target, b, 0.9, 0.7);
  const double h = 1e-6;
  for (std::size_t l = 0; l < online.layer_count(); ++l) {
    for (Eigen::Index i = 0; i < online.weight(l).size(); ++i) {
      const double orig = online.weight(l).data()[i];
      online.weight(l).data()[i] = orig + h;
      const double up = orl::cql_loss(online, target, b, 0.9, 0.7).loss;
      online.weight(l).data()[i] = orig - h;
      const double down = orl::cql_loss(online, target, b, 0.9, 0.7).loss;
      online.weight(l).data()[i] = orig;
      CHECK(lg.grads.weights[l].data()[i] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("fraction episode counts") {
  CHECK(orl::fraction_episode_count(100, 0.05) == 5);
  CHECK(orl::fraction_episode_count(100, 0.3) == 30);
  CHECK(orl::fraction_episode_count(100, 1.0) == 100);
  CHECK(orl::fraction_episode_count(7, 0.5) == 4);
  CHECK(orl::fraction_episode_count(3, 0.01) == 1);
}

TEST_CASE("zero gradient steps return the initial network") {
  const auto d = testutil::toy_dataset(10, 3, 4, 5, 1);
  auto c = small_cql();
  c.gradient_steps = 0;
  const auto p = orl::train_cql(d, all_features(3), orl::reward_full(), c, 4);
  CHECK(p.q_model == orl::Mlp::init({3, 16, 4}, orl::derive_seed(4, "cql.init")));
  CHECK(p.rule == orl::SelectionRule::greedy());
  CHECK(p.id == "cql_all_f");
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("training is deterministic per seed") {
  const auto d = testutil::toy_dataset(20, 3, 4, 6, 2);
  const auto a = orl::train_cql(d, all_features(3), orl::reward_full(), small_cql(), 8, "x");
  const auto b = orl::train_cql(d, all_features(3), orl::reward_full(), small_cql(), 8, "x");
  const auto c = orl::train_cql(d, all_features(3), orl::reward_full(), small_cql(), 9, "x");
  CHECK(a == b);
  CHECK_FALSE(a.q_model == c.q_model);
}

TEST_CASE("only the leading fraction of episodes is read") {
  const auto d = testutil::toy_dataset(20, 3, 4, 6, 3);
  auto altered = d;
  for (std::size_t e = 10; e < altered.episodes.size(); ++e)
    for (auto& tr : altered.episodes[e].steps) tr.reward.state_based += 1000.0;
  auto c = small_cql();
  c.dataset_fraction = 0.5;
  CHECK(orl::train_cql(d, all_features(3), orl::reward_full(), c, 1).q_model ==
        orl::train_cql(altered, all_features(3), orl::reward_full(), c, 1).q_model);
}

TEST_CASE("the conservative penalty lowers the gap on logged actions") {
  const auto d = testutil::toy_dataset(40, 3, 4, 8, 4);
  const auto proj = orl::project_transitions(d, all_features(3), orl::reward_full());
  auto c = small_cql();
  c.gradient_steps = 600;
  c.alpha = 0.0;
  const auto plain = orl::train_cql(d, all_features(3), orl::reward_full(), c, 1);
  c.alpha = 2.0;
  const auto conservative = orl::train_cql(d, all_features(3), orl::reward_full(), c, 1);
  const double g0 = orl::conservative_gap(plain.q_model, proj.states, proj.actions);
  const double g1 = orl::conservative_gap(conservative.q_model, proj.states, proj.actions);
  CHECK(g1 < g0);
  CHECK(g1 < std::log(4.0));
}

TEST_CASE("invalid inputs are rejected") {
  const auto d = testutil::toy_dataset(4, 3, 4, 3, 5);
  auto c = small_cql();
  c.alpha = -1.0;
  CHECK_THROWS_AS(orl::train_cql(d, all_features(3), orl::reward_full(), c, 1), orl::UsageError);
  orl::Dataset empty;
  empty.header.feature_names = {"a", "b", "c"};
  empty.header.action_count = 4;
  CHECK_THROWS_AS(orl::train_cql(empty, all_features(3), orl::reward_full(), small_cql(), 1), orl::UsageError);
  CHECK_THROWS_AS(orl::train_cql(d, all_features(4), orl::reward_full(), small_cql(), 1), orl::UsageError);
}
