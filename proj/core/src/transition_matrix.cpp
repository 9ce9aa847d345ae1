#include "orl/transition_matrix.hpp"

#include "orl/error.hpp"

namespace orl {

ProjectedTransitions project_transitions(const Dataset& dataset, const StateSpaceSpec& spec,
                                         const RewardSpec& reward, std::size_t episode_limit) {
  spec.validate(dataset.union_dim());
  reward.validate();
  const std::size_t episodes =
      episode_limit == 0 ? dataset.episodes.size() : std::min(episode_limit, dataset.episodes.size());
  std::size_t n = 0;
  for (std::size_t e = 0; e < episodes; ++e) n += dataset.episodes[e].steps.size();

  const auto dim = static_cast<Eigen::Index>(spec.dim());
  ProjectedTransitions out;
  out.states.resize(dim, static_cast<Eigen::Index>(n));
  out.next_states.resize(dim, static_cast<Eigen::Index>(n));
  out.actions.resize(n);
  out.rewards.resize(static_cast<Eigen::Index>(n));
  out.continuation.resize(static_cast<Eigen::Index>(n));
  out.propensities.resize(static_cast<Eigen::Index>(n));
  out.episode_offsets.reserve(episodes + 1);
  std::size_t i = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    out.episode_offsets.push_back(i);
    for (const auto& tr : dataset.episodes[e].steps) {
      const auto col = static_cast<Eigen::Index>(i);
      project_state_into(tr.state, spec, {tr.episode_id, tr.t},
                         std::span<double>(out.states.col(col).data(), spec.dim()));
      project_state_into(tr.next_state, spec, {tr.episode_id, tr.t + 1},
                         std::span<double>(out.next_states.col(col).data(), spec.dim()));
      out.actions[i] = tr.action;
      out.rewards(col) = apply_reward_spec(tr.reward, reward);
      out.continuation(col) = tr.true_terminal() ? 0.0 : 1.0;
      out.propensities(col) = tr.propensity;
      ++i;
    }
  }
  out.episode_offsets.push_back(i);
  return out;
}

Eigen::MatrixXd project_initial_states(const Dataset& dataset, const StateSpaceSpec& spec) {
  spec.validate(dataset.union_dim());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(dataset.episodes.size()));
  for (std::size_t e = 0; e < dataset.episodes.size(); ++e) {
    const auto& ep = dataset.episodes[e];
    if (ep.steps.empty()) throw ValidationError("episode " + std::to_string(ep.id) + " is empty");
    const auto& first = ep.steps.front();
    project_state_into(first.state, spec, {first.episode_id, first.t},
                       std::span<double>(out.col(static_cast<Eigen::Index>(e)).data(), spec.dim()));
  }
  return out;
}

TransitionBatch gather_batch(const ProjectedTransitions& data, std::span<const std::size_t> indices) {
  TransitionBatch b;
  const auto k = static_cast<Eigen::Index>(indices.size());
  b.states.resize(data.states.rows(), k);
  b.next_states.resize(data.next_states.rows(), k);
  b.actions.resize(indices.size());
  b.rewards.resize(k);
  b.continuation.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto src = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]);
    b.states.col(j) = data.states.col(src);
    b.next_states.col(j) = data.next_states.col(src);
    b.actions[static_cast<std::size_t>(j)] = data.actions[static_cast<std::size_t>(src)];
    b.rewards(j) = data.rewards(src);
    b.continuation(j) = data.continuation(src);
  }
  return b;
}

}  // namespace orl
