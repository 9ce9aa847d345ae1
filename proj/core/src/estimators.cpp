#include "orl/ope/estimators.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "orl/error.hpp"
#include "orl/transition_matrix.hpp"

namespace orl {

namespace {

void require_propensities(const ProjectedTransitions& data) {
  for (Eigen::Index i = 0; i < data.propensities.size(); ++i) {
    const double p = data.propensities(i);
    if (!(p > 0.0 && p <= 1.0)) {
      throw ValidationError("logged propensity " + std::to_string(p) + " at transition " + std::to_string(i) +
                            " is outside (0, 1]; importance weights are undefined");
    }
  }
}

void check_policy(const Dataset& dataset, const PolicyArtifact& policy) {
  policy.validate();
  if (policy.action_count != dataset.header.action_count) {
    throw UsageError("policy '" + policy.id + "' action count differs from the dataset");
  }
}

double standard_error(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

void fill_weight_diagnostics(OpeDiagnostics& d, const std::vector<double>& w) {
  d.episodes = w.size();
  d.nonzero_weights = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) { return x != 0.0; }));
  d.weight_max = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
  d.weight_mean = w.empty() ? 0.0 : std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  d.effective_sample_size = d.nonzero_weights == 0 ? 0.0 : effective_sample_size(w);
}

}  // namespace

double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0;
  double sq = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw UsageError("effective sample size of a negative weight");
    sum += w;
    sq += w * w;
  }
  if (sq == 0.0) throw NumericalError("effective sample size of all-zero weights");
  return sum * sum / sq;
}

OpeReport estimate_is(const Dataset& dataset, const PolicyArtifact& policy, const RewardSpec& reward, double gamma,
                      bool weighted) {
  check_policy(dataset, policy);
  const ProjectedTransitions data = project_transitions(dataset, policy.state_spec, reward);
  require_propensities(data);
  const Eigen::MatrixXd probs = policy.probabilities_batch(data.states);

  const std::size_t episodes = data.episode_count();
  std::vector<double> weights(episodes);
  std::vector<double> returns(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    double log_w = 0.0;
    bool zero = false;
    double g = 0.0;
    double discount = 1.0;
    for (std::size_t i = data.episode_offsets[e]; i < data.episode_offsets[e + 1]; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      const double pi = probs(data.actions[i], col);
      if (pi == 0.0) zero = true;
      if (!zero) log_w += std::log(pi) - std::log(data.propensities(col));
      g += discount * data.rewards(col);
      discount *= gamma;
    }
    weights[e] = zero ? 0.0 : std::exp(log_w);
    if (!std::isfinite(weights[e])) {
      throw NumericalError("importance weight of episode " + std::to_string(dataset.episodes[e].id) + " overflowed");
    }
    returns[e] = g;
  }

  OpeReport r;
  r.estimator = weighted ? "wis" : "is";
  r.policy_id = policy.id;
  r.reward_spec = reward.name;
  fill_weight_diagnostics(r.diagnostics, weights);
  r.per_episode.resize(episodes);
  if (weighted) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total == 0.0) {
      throw NumericalError("weighted importance sampling is degenerate: every episode weight is zero for policy '" +
                           policy.id + "'");
    }
    for (std::size_t e = 0; e < episodes; ++e) r.per_episode[e] = weights[e] * returns[e] / total;
    r.aggregation = OpeReport::Aggregation::sum;
    r.standard_error = std::numeric_limits<double>::quiet_NaN();
  } else {
    for (std::size_t e = 0; e < episodes; ++e) r.per_episode[e] = weights[e] * returns[e];
    r.aggregation = OpeReport::Aggregation::mean;
    r.standard_error = standard_error(r.per_episode);
  }
  r.value = r.aggregate();
  if (!std::isfinite(r.value)) throw NumericalError("importance sampling estimate is not finite");
  return r;
}

OpeReport estimate_dm_fqe(const QFunction& q, const Dataset& dataset, const PolicyArtifact& policy) {
  check_policy(dataset, policy);
  if (dataset.episodes.empty()) throw UsageError("direct method on an empty dataset");
  const Eigen::MatrixXd q0 = evaluate_q(q, project_initial_states(dataset, q.context));
  const Eigen::MatrixXd p0 = policy.probabilities_batch(project_initial_states(dataset, policy.state_spec));
  if (q0.rows() != p0.rows()) throw UsageError("Q-function and policy disagree on the action count");

  OpeReport r;
  r.estimator = "dm_fqe";
  r.policy_id = policy.id;
  r.reward_spec = q.reward_spec;
  r.aggregation = OpeReport::Aggregation::mean;
  r.per_episode.resize(static_cast<std::size_t>(q0.cols()));
  for (Eigen::Index e = 0; e < q0.cols(); ++e) r.per_episode[static_cast<std::size_t>(e)] = p0.col(e).dot(q0.col(e));
  r.value = r.aggregate();
  r.standard_error = standard_error(r.per_episode);
  r.diagnostics.episodes = r.per_episode.size();
  r.diagnostics.fqe_loss_trace = q.loss_trace;
  if (!std::isfinite(r.value)) throw NumericalError("direct method estimate is not finite");
  return r;
}

OpeReport estimate_dr(const Dataset& dataset, const QFunction& q, const PolicyArtifact& policy,
                      const RewardSpec& reward, double gamma) {
  check_policy(dataset, policy);
  if (!q.reward_spec.empty() && q.reward_spec != reward.name) {
    throw UsageError("doubly robust: Q-function was fitted for reward '" + q.reward_spec + "', not '" + reward.name +
                     "'");
  }
  const ProjectedTransitions own = project_transitions(dataset, policy.state_spec, reward);
  require_propensities(own);
  const ProjectedTransitions ctx = project_transitions(dataset, q.context, reward);
  const Eigen::MatrixXd probs = policy.probabilities_batch(own.states);
  const Eigen::MatrixXd next_probs = policy.probabilities_batch(own.next_states);
  const Eigen::MatrixXd q_s = evaluate_q(q, ctx.states);
  const Eigen::MatrixXd q_next = evaluate_q(q, ctx.next_states);

  const std::size_t episodes = own.episode_count();
  OpeReport r;
  r.estimator = "dr";
  r.policy_id = policy.id;
  r.reward_spec = reward.name;
  r.aggregation = OpeReport::Aggregation::mean;
  r.per_episode.resize(episodes);
  std::vector<double> rho_products(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    const std::size_t begin = own.episode_offsets[e];
    const std::size_t end = own.episode_offsets[e + 1];
    const auto last = static_cast<Eigen::Index>(end - 1);
    double v_next = 0.0;
    if (own.continuation(last) != 0.0) v_next = next_probs.col(last).dot(q_next.col(last));
    double rho_product = 1.0;
    for (std::size_t i = end; i-- > begin;) {
      const auto col = static_cast<Eigen::Index>(i);
      const int a = own.actions[i];
      const double rho = probs(a, col) / own.propensities(col);
      const double v_hat = probs.col(col).dot(q_s.col(col));
      v_next = v_hat + rho * (own.rewards(col) + gamma * v_next - q_s(a, col));
      rho_product *= rho;
    }
    r.per_episode[e] = v_next;
    rho_products[e] = rho_product;
  }
  fill_weight_diagnostics(r.diagnostics, rho_products);
  r.diagnostics.fqe_loss_trace = q.loss_trace;
  r.value = r.aggregate();
  r.standard_error = standard_error(r.per_episode);
  if (!std::isfinite(r.value)) throw NumericalError("doubly robust estimate is not finite");
  return r;
}

}  // namespace orl
