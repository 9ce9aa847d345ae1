#include "orl/offline/cql.hpp"

#include <cmath>
#include <sstream>

#include "orl/error.hpp"
#include "orl/funcapprox/adam.hpp"
#include "orl/online/ddqn.hpp"

namespace orl {

void CqlConfig::validate() const {
  if (!(alpha >= 0.0)) throw UsageError("cql: alpha must be non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw UsageError("cql: gamma must lie in (0, 1]");
  if (!(step_size > 0.0)) throw UsageError("cql: step_size must be positive");
  if (batch_size <= 0) throw UsageError("cql: batch_size must be positive");
  if (gradient_steps < 0) throw UsageError("cql: gradient_steps must be non-negative");
  if (!(tau > 0.0 && tau <= 1.0)) throw UsageError("cql: tau must lie in (0, 1]");
  if (!(dataset_fraction > 0.0 && dataset_fraction <= 1.0)) throw UsageError("cql: dataset_fraction must lie in (0, 1]");
  for (int h : hidden) {
    if (h <= 0) throw UsageError("cql: hidden layer sizes must be positive");
  }
}

std::string CqlConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << alpha << ";gamma=" << gamma << ";step_size=" << step_size << ";batch_size=" << batch_size
     << ";gradient_steps=" << gradient_steps << ";tau=" << tau << ";dataset_fraction=" << dataset_fraction
     << ";hidden=";
  for (int h : hidden) os << h << ",";
  return os.str();
}

namespace {

double logsumexp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

LossAndGradients cql_loss(const Mlp& online, const Mlp& target, const TransitionBatch& batch, double gamma,
                          double alpha) {
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
    dout(a, j) += err / n;
    if (alpha != 0.0) {
      const double lse = logsumexp(q.col(j));
      out.loss += alpha * (lse - q(a, j)) / n;
      dout.col(j) += alpha / n * (q.col(j).array() - lse).exp().matrix();
      dout(a, j) -= alpha / n;
    }
  }
  out.grads = online.backward(cache, dout);
  return out;
}

double conservative_gap(const Mlp& model, const Eigen::MatrixXd& states, const std::vector<int>& actions) {
  if (states.cols() == 0) return 0.0;
  const Eigen::MatrixXd q = model.forward_batch(states);
  double total = 0.0;
  for (Eigen::Index j = 0; j < q.cols(); ++j) total += logsumexp(q.col(j)) - q(actions[static_cast<std::size_t>(j)], j);
  return total / static_cast<double>(q.cols());
}

std::size_t fraction_episode_count(std::size_t episodes, double fraction) {
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(episodes) - 1e-9));
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(episodes, 1));
}

PolicyArtifact train_cql(const Dataset& dataset, const StateSpaceSpec& state_spec, const RewardSpec& reward_spec,
                         const CqlConfig& config, std::uint64_t seed, std::string id) {
  config.validate();
  if (dataset.episodes.empty() || dataset.transition_count() == 0) throw UsageError("cql: empty dataset");
  state_spec.validate(dataset.union_dim());
  const std::size_t episodes = fraction_episode_count(dataset.episodes.size(), config.dataset_fraction);
  ProjectedTransitions data = project_transitions(dataset, state_spec, reward_spec, episodes);
  // Unit reward scale keeps the conservative penalty comparable across rewards.
  const double max_reward = data.rewards.size() ? data.rewards.cwiseAbs().maxCoeff() : 0.0;
  if (max_reward > 0.0) data.rewards /= max_reward;
  const int actions = dataset.header.action_count;
  for (int a : data.actions) {
    if (a < 0 || a >= actions) throw ValidationError("cql: logged action out of range");
  }

  std::vector<int> sizes{static_cast<int>(state_spec.dim())};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(actions);
  Mlp online = Mlp::init(sizes, derive_seed(seed, "cql.init"));
  Mlp target = online;
  AdamConfig adam_config;
  adam_config.step_size = config.step_size;
  AdamState adam = AdamState::for_model(online, adam_config);
  Rng rng = make_rng(seed, "cql.minibatch");

  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), data.size());
  std::vector<std::size_t> idx;
  for (int step = 0; step < config.gradient_steps; ++step) {
    sample_without_replacement(rng, data.size(), batch, idx);
    const TransitionBatch b = gather_batch(data, idx);
    const LossAndGradients lg = cql_loss(online, target, b, config.gamma, config.alpha);
    if (!std::isfinite(lg.loss)) throw NumericalError("cql loss became non-finite at step " + std::to_string(step));
    adam_step(online, lg.grads, adam);
    soft_update(target, online, config.tau);
  }

  PolicyArtifact p;
  p.id = id.empty() ? "cql_" + state_spec.name + "_" + reward_spec.name : std::move(id);
  p.q_model = std::move(online);
  p.state_spec = state_spec;
  p.reward_spec = reward_spec.name;
  p.action_count = actions;
  p.rule = SelectionRule::greedy();
  p.config_hash = hex64(fnv1a64(config.canonical() + "|" + dataset.header.env_config_hash));
  p.seed = seed;
  return p;
}

}  // namespace orl
