#include <cmath>
#include <random>

#include "doctest.h"
#include "orl/error.hpp"
#include "orl/funcapprox/adam.hpp"
#include "orl/funcapprox/mlp.hpp"
#include "orl/random.hpp"

using orl::Mlp;

namespace {

double loss_of(const Mlp& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t, const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd y = m.forward_batch(x);
  return 0.5 * (w.array() * (y - t).array().square()).sum() / static_cast<double>(x.cols());
}

Eigen::MatrixXd random_matrix(int r, int c, orl::Rng& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  orl::Rng rng(3);
  for (const auto& sizes : {std::vector<int>{3, 5, 2}, std::vector<int>{4, 6, 6, 3}, std::vector<int>{2, 1}}) {
    Mlp m = Mlp::init(sizes, 11);
    // Nonzero biases move the rectifier kinks away from the probe points.
    for (std::size_t l = 0; l < m.layer_count(); ++l) m.bias(l).setConstant(0.05);
    const int batch = 7;
    const Eigen::MatrixXd x = random_matrix(sizes.front(), batch, rng);
    const Eigen::MatrixXd t = random_matrix(sizes.back(), batch, rng);
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(sizes.back(), batch);
    w(0, 0) = 0.0;
    w(sizes.back() - 1, batch - 1) = 2.5;
    const auto lg = orl::weighted_squared_error(m, x, t, w);
    CHECK(lg.loss == doctest::Approx(loss_of(m, x, t, w)).epsilon(1e-12));
    const double h = 1e-6;
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
      for (Eigen::Index i = 0; i < m.weight(l).size(); ++i) {
        const double orig = m.weight(l).data()[i];
        m.weight(l).data()[i] = orig + h;
        const double up = loss_of(m, x, t, w);
        m.weight(l).data()[i] = orig - h;
        const double down = loss_of(m, x, t, w);
        m.weight(l).data()[i] = orig;
        const double fd = (up - down) / (2 * h);
        CHECK(lg.grads.weights[l].data()[i] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
      for (Eigen::Index i = 0; i < m.bias(l).size(); ++i) {
        const double orig = m.bias(l)(i);
        m.bias(l)(i) = orig + h;
        const double up = loss_of(m, x, t, w);
        m.bias(l)(i) = orig - h;
        const double down = loss_of(m, x, t, w);
        m.bias(l)(i) = orig;
        CHECK(lg.grads.biases[l](i) == doctest::Approx((up - down) / (2 * h)).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("single forward agrees with batch forward") {
  Mlp m = Mlp::init({4, 8, 3}, 1);
  orl::Rng rng(2);
  const Eigen::MatrixXd x = random_matrix(4, 5, rng);
  const Eigen::MatrixXd y = m.forward_batch(x);
  for (int j = 0; j < 5; ++j) {
    const Eigen::VectorXd col = x.col(j);
    const Eigen::VectorXd single = m.forward(std::span<const double>(col.data(), 4));
    CHECK((single - y.col(j)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("initialization is deterministic and shaped") {
  const Mlp a = Mlp::init({8, 16, 4}, 42);
  const Mlp b = Mlp::init({8, 16, 4}, 42);
  const Mlp c = Mlp::init({8, 16, 4}, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.parameter_count() == 8 * 16 + 16 + 16 * 4 + 4);
  CHECK(a.weight(0).rows() == 16);
  CHECK(a.weight(0).cols() == 8);
  CHECK(a.bias(1).isZero());
  CHECK_THROWS_AS(Mlp::init({3}, 1), orl::UsageError);
}

TEST_CASE("input dimension mismatch is a usage error") {
  const Mlp m = Mlp::init({3, 4, 2}, 1);
  CHECK_THROWS_AS(m.forward_batch(Eigen::MatrixXd::Zero(2, 1)), orl::UsageError);
}

TEST_CASE("soft update interpolates parameters") {
  Mlp target = Mlp::zeros({2, 3, 1});
  const Mlp online = Mlp::init({2, 3, 1}, 5);
  orl::soft_update(target, online, 0.25);
  CHECK(target.weight(0).isApprox(0.25 * online.weight(0)));
  orl::soft_update(target, online, 1.0);
  CHECK(target == online);
}

TEST_CASE("adam fits a linear map") {
  Mlp m = Mlp::init({2, 1}, 9);
  auto state = orl::AdamState::for_model(m, {0.05});
  orl::Rng rng(4);
  const Eigen::MatrixXd x = random_matrix(2, 64, rng);
  Eigen::MatrixXd t(1, 64);
  t.row(0) = 3.0 * x.row(0) - 2.0 * x.row(1);
  t.array() += 0.5;
  const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 64);
  for (int i = 0; i < 2000; ++i) {
    const auto lg = orl::weighted_squared_error(m, x, t, w);
    orl::adam_step(m, lg.grads, state);
  }
  CHECK(m.weight(0)(0, 0) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(m.weight(0)(0, 1) == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(m.bias(0)(0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(state.step == 2000);
}

TEST_CASE("gradient arithmetic") {
  const Mlp m = Mlp::init({2, 2}, 1);
  auto g = m.zero_like();
  g.weights[0].setConstant(1.0);
  g.biases[0].setConstant(-3.0);
  auto h = g;
  h += g;
  h *= 0.5;
  CHECK(h.max_abs() == 3.0);
  CHECK(h.weights[0].isApprox(g.weights[0]));
}
