#include "orl/ope/fqe.hpp"

#include <cmath>
#include <sstream>

#include "orl/error.hpp"
#include "orl/funcapprox/adam.hpp"
#include "orl/transition_matrix.hpp"

namespace orl {

void FqeConfig::validate() const {
  if (iterations < 1) throw UsageError("fqe: iterations must be at least 1");
  if (steps_per_iteration < 1) throw UsageError("fqe: steps_per_iteration must be at least 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("fqe: gamma must lie in [0, 1]");
  if (!(step_size > 0.0)) throw UsageError("fqe: step_size must be positive");
  if (batch_size <= 0) throw UsageError("fqe: batch_size must be positive");
  for (int h : hidden) {
    if (h <= 0) throw UsageError("fqe: hidden layer sizes must be positive");
  }
}

std::string FqeConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "iterations=" << iterations << ";steps=" << steps_per_iteration << ";gamma=" << gamma
     << ";step_size=" << step_size << ";batch_size=" << batch_size << ";hidden=";
  for (int h : hidden) os << h << ",";
  return os.str();
}

Eigen::MatrixXd evaluate_q(const QFunction& q, const Eigen::MatrixXd& context_states) {
  constexpr Eigen::Index kChunk = 4096;
  Eigen::MatrixXd out(q.model.output_dim(), context_states.cols());
  for (Eigen::Index start = 0; start < context_states.cols(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, context_states.cols() - start);
    out.middleCols(start, n) = q.scale * q.model.forward_batch(context_states.middleCols(start, n));
  }
  return out;
}

QFunction fit_fqe(const Dataset& dataset, const PolicyArtifact& policy, const RewardSpec& reward,
                  const StateSpaceSpec& context, const FqeConfig& config, std::uint64_t seed) {
  config.validate();
  policy.validate();
  if (dataset.transition_count() == 0) throw UsageError("fqe: empty dataset");
  if (!is_projection_of(policy.state_spec, context)) {
    throw UsageError("fqe: policy state space '" + policy.state_spec.name +
                     "' is not a projection of evaluator context '" + context.name + "'");
  }
  if (policy.action_count != dataset.header.action_count) throw UsageError("fqe: policy action count differs from dataset");

  const ProjectedTransitions data = project_transitions(dataset, context, reward);
  const Eigen::MatrixXd next_probs =
      policy.probabilities_batch(project_transitions(dataset, policy.state_spec, reward).next_states);

  std::vector<int> sizes{static_cast<int>(context.dim())};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(policy.action_count);

  QFunction q;
  q.model = Mlp::init(sizes, derive_seed(seed, "fqe.init"));
  // Iteration zero is Q = 0: an all-zero reward then yields exactly zero values.
  q.model.weight(q.model.layer_count() - 1).setZero();
  q.context = context;
  const double max_reward = data.rewards.size() ? data.rewards.cwiseAbs().maxCoeff() : 0.0;
  q.scale = max_reward > 0.0 ? max_reward : 1.0;
  q.reward_spec = reward.name;
  q.policy_id = policy.id;
  AdamConfig adam_config;
  adam_config.step_size = config.step_size;
  AdamState adam = AdamState::for_model(q.model, adam_config);
  Rng rng = make_rng(seed, "fqe.minibatch");

  const std::size_t n = data.size();
  const bool full_batch = static_cast<std::size_t>(config.batch_size) >= n;
  const std::size_t batch = full_batch ? n : static_cast<std::size_t>(config.batch_size);
  const auto actions = static_cast<Eigen::Index>(policy.action_count);

  Eigen::MatrixXd inputs(data.states.rows(), static_cast<Eigen::Index>(batch));
  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(actions, static_cast<Eigen::Index>(batch));
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(actions, static_cast<Eigen::Index>(batch));
  if (full_batch) {
    inputs = data.states;
    for (std::size_t j = 0; j < n; ++j) mask(data.actions[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  std::vector<std::size_t> idx;

  for (int it = 0; it < config.iterations; ++it) {
    QFunction frozen{q.model, context, {}, {}, 1.0, {}};
    const Eigen::MatrixXd q_next = evaluate_q(frozen, data.next_states);
    const Eigen::VectorXd next_value = (next_probs.array() * q_next.array()).colwise().sum().transpose();
    const Eigen::VectorXd y = data.rewards / q.scale + config.gamma * data.continuation.cwiseProduct(next_value);
    if (full_batch) {
      for (std::size_t j = 0; j < n; ++j) targets(data.actions[j], static_cast<Eigen::Index>(j)) = y(static_cast<Eigen::Index>(j));
    }

    double loss_sum = 0.0;
    for (int step = 0; step < config.steps_per_iteration; ++step) {
      if (!full_batch) {
        sample_without_replacement(rng, n, batch, idx);
        mask.setZero();
        targets.setZero();
        for (std::size_t j = 0; j < batch; ++j) {
          const auto col = static_cast<Eigen::Index>(j);
          const auto src = static_cast<Eigen::Index>(idx[j]);
          inputs.col(col) = data.states.col(src);
          const int a = data.actions[idx[j]];
          targets(a, col) = y(src);
          mask(a, col) = 1.0;
        }
      }
      const LossAndGradients lg = weighted_squared_error(q.model, inputs, targets, mask);
      if (!std::isfinite(lg.loss)) {
        throw NumericalError("fqe regression diverged at iteration " + std::to_string(it));
      }
      loss_sum += lg.loss;
      adam_step(q.model, lg.grads, adam);
    }
    q.loss_trace.push_back(loss_sum / config.steps_per_iteration);
  }
  if (!q.model.all_finite()) throw NumericalError("fqe produced non-finite parameters");
  return q;
}

}  // namespace orl
