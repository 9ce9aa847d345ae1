#include "orl/online/ddqn.hpp"

#include <span>

#include "orl/error.hpp"
#include "orl/policy.hpp"

namespace orl {

namespace {

void check_batch(const Mlp& online, const TransitionBatch& batch) {
  if (batch.size() == 0) throw UsageError("empty transition batch");
  if (batch.states.rows() != online.input_dim() || batch.next_states.rows() != online.input_dim()) {
    throw UsageError("batch state dimension does not match the network input");
  }
  for (int a : batch.actions) {
    if (a < 0 || a >= online.output_dim()) throw UsageError("batch action out of range");
  }
}

}  // namespace

Eigen::VectorXd double_q_targets(const Mlp& online, const Mlp& target, const TransitionBatch& batch, double gamma) {
  check_batch(online, batch);
  if (target.layer_sizes() != online.layer_sizes()) throw UsageError("online and target networks differ in shape");
  const Eigen::MatrixXd q_online = online.forward_batch(batch.next_states);
  const Eigen::MatrixXd q_target = target.forward_batch(batch.next_states);
  Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const int a = argmax_lowest(std::span<const double>(q_online.col(j).data(), static_cast<std::size_t>(q_online.rows())));
    y(j) = batch.rewards(j) + gamma * batch.continuation(j) * q_target(a, j);
  }
  return y;
}

LossAndGradients ddqn_update(const Mlp& online, const Mlp& target, const TransitionBatch& batch, double gamma) {
  const Eigen::VectorXd y = double_q_targets(online, target, batch, gamma);
  const auto cache = online.forward_cached(batch.states);
  const auto& q = cache.output();
  const double n = static_cast<double>(batch.size());
  Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  LossAndGradients out;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const int a = batch.actions[static_cast<std::size_t>(j)];
    const double err = q(a, j) - y(j);
    out.loss += 0.5 * err * err / n;
    dout(a, j) = err / n;
  }
  out.grads = online.backward(cache, dout);
  return out;
}

}  // namespace orl
