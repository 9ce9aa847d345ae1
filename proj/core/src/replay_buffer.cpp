#include "orl/online/replay_buffer.hpp"

#include "orl/error.hpp"

namespace orl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim)
    : capacity_(capacity),
      states_(static_cast<Eigen::Index>(state_dim), static_cast<Eigen::Index>(capacity)),
      next_states_(static_cast<Eigen::Index>(state_dim), static_cast<Eigen::Index>(capacity)),
      actions_(capacity),
      rewards_(static_cast<Eigen::Index>(capacity)),
      continuation_(static_cast<Eigen::Index>(capacity)) {
  if (capacity == 0) throw UsageError("replay capacity must be positive");
}

void ReplayBuffer::push(std::span<const double> state, int action, double reward,
                        std::span<const double> next_state, double continuation) {
  const auto dim = static_cast<std::size_t>(states_.rows());
  if (state.size() != dim || next_state.size() != dim) throw UsageError("replay: state dimension mismatch");
  const auto col = static_cast<Eigen::Index>(cursor_);
  states_.col(col) = Eigen::Map<const Eigen::VectorXd>(state.data(), states_.rows());
  next_states_.col(col) = Eigen::Map<const Eigen::VectorXd>(next_state.data(), states_.rows());
  actions_[cursor_] = action;
  rewards_(col) = reward;
  continuation_(col) = continuation;
  cursor_ = (cursor_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

TransitionBatch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0 || batch_size > size_) {
    throw UsageError("replay: cannot sample " + std::to_string(batch_size) + " of " + std::to_string(size_));
  }
  std::vector<std::size_t> idx;
  sample_without_replacement(rng, size_, batch_size, idx);
  TransitionBatch b;
  const auto k = static_cast<Eigen::Index>(batch_size);
  b.states.resize(states_.rows(), k);
  b.next_states.resize(states_.rows(), k);
  b.actions.resize(batch_size);
  b.rewards.resize(k);
  b.continuation.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto src = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]);
    b.states.col(j) = states_.col(src);
    b.next_states.col(j) = next_states_.col(src);
    b.actions[static_cast<std::size_t>(j)] = actions_[static_cast<std::size_t>(src)];
    b.rewards(j) = rewards_(src);
    b.continuation(j) = continuation_(src);
  }
  return b;
}

}  // namespace orl
