#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "orl/random.hpp"
#include "orl/transition_matrix.hpp"

namespace orl {

/// Fixed-capacity ring buffer of transitions. A sampled batch never repeats
/// a slot.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim);

  void push(std::span<const double> state, int action, double reward, std::span<const double> next_state,
            double continuation);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }

  TransitionBatch sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  Eigen::MatrixXd states_;
  Eigen::MatrixXd next_states_;
  std::vector<int> actions_;
  Eigen::VectorXd rewards_;
  Eigen::VectorXd continuation_;
};

}  // namespace orl
