#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace orl {

/// Gradients (or any per-parameter quantity) shaped like an Mlp.
struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  MlpGradients& operator+=(const MlpGradients& other);
  MlpGradients& operator*=(double s);
  double max_abs() const;
};

/// Dense network with rectified hidden layers and a linear output layer.
/// Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;

  /// Weights ~ N(0, 1/fan_in), biases zero. Needs at least two layer sizes.
  static Mlp init(std::vector<int> layer_sizes, std::uint64_t seed);
  /// Zero parameters with the given shape.
  static Mlp zeros(std::vector<int> layer_sizes);

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  int input_dim() const noexcept { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_dim() const noexcept { return sizes_.empty() ? 0 : sizes_.back(); }
  std::size_t layer_count() const noexcept { return weights_.size(); }
  std::size_t parameter_count() const noexcept;

  Eigen::MatrixXd& weight(std::size_t layer) { return weights_.at(layer); }
  const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_.at(layer); }
  Eigen::VectorXd& bias(std::size_t layer) { return biases_.at(layer); }
  const Eigen::VectorXd& bias(std::size_t layer) const { return biases_.at(layer); }

  Eigen::VectorXd forward(std::span<const double> input) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  /// Pre-activations and activations of one batch, kept for backward().
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // [0] is the input
    std::vector<Eigen::MatrixXd> preacts;
    const Eigen::MatrixXd& output() const { return activations.back(); }
  };
  Cache forward_cached(const Eigen::MatrixXd& inputs) const;
  /// Parameter gradients given dLoss/dOutput for the cached batch.
  MlpGradients backward(const Cache& cache, const Eigen::MatrixXd& output_grad) const;

  MlpGradients zero_like() const;
  bool all_finite() const;

  bool operator==(const Mlp& other) const;

 private:
  void check_input_rows(Eigen::Index rows) const;

  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
};

struct LossAndGradients {
  double loss = 0.0;
  MlpGradients grads;
};

/// Loss = 1/(2B) * sum_b sum_o w_ob (y_ob - t_ob)^2 and its exact gradient.
/// `weights` masks or scales individual outputs (e.g. the taken action).
LossAndGradients weighted_squared_error(const Mlp& model, const Eigen::MatrixXd& inputs,
                                        const Eigen::MatrixXd& targets, const Eigen::MatrixXd& weights);

/// target <- tau * online + (1 - tau) * target
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace orl
