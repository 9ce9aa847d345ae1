#include "orl/funcapprox/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "orl/error.hpp"
#include "orl/random.hpp"

namespace orl {

MlpGradients& MlpGradients::operator+=(const MlpGradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

MlpGradients& MlpGradients::operator*=(double s) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= s;
    biases[l] *= s;
  }
  return *this;
}

double MlpGradients::max_abs() const {
  double m = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].size()) m = std::max(m, weights[l].cwiseAbs().maxCoeff());
    if (biases[l].size()) m = std::max(m, biases[l].cwiseAbs().maxCoeff());
  }
  return m;
}

Mlp Mlp::zeros(std::vector<int> layer_sizes) {
  if (layer_sizes.size() < 2) throw UsageError("an Mlp needs at least an input and an output layer");
  for (int s : layer_sizes) {
    if (s <= 0) throw UsageError("Mlp layer sizes must be positive");
  }
  Mlp m;
  m.sizes_ = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
    m.weights_.push_back(Eigen::MatrixXd::Zero(m.sizes_[l + 1], m.sizes_[l]));
    m.biases_.push_back(Eigen::VectorXd::Zero(m.sizes_[l + 1]));
  }
  return m;
}

Mlp Mlp::init(std::vector<int> layer_sizes, std::uint64_t seed) {
  Mlp m = zeros(std::move(layer_sizes));
  Rng rng = make_rng(seed, "mlp.init");
  for (std::size_t l = 0; l < m.weights_.size(); ++l) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m.sizes_[l])));
    auto& w = m.weights_[l];
    // Row-major fill order so the draw sequence matches the serialized layout.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = normal(rng);
    }
  }
  return m;
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

void Mlp::check_input_rows(Eigen::Index rows) const {
  if (sizes_.empty()) throw UsageError("forward pass on an uninitialized Mlp");
  if (rows != sizes_.front()) {
    throw UsageError("Mlp input has " + std::to_string(rows) + " features, expected " +
                     std::to_string(sizes_.front()));
  }
}

Eigen::VectorXd Mlp::forward(std::span<const double> input) const {
  check_input_rows(static_cast<Eigen::Index>(input.size()));
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    a = (l + 1 < weights_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
  check_input_rows(inputs.rows());
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Mlp::Cache Mlp::forward_cached(const Eigen::MatrixXd& inputs) const {
  check_input_rows(inputs.rows());
  Cache c;
  c.activations.reserve(weights_.size() + 1);
  c.preacts.reserve(weights_.size());
  c.activations.push_back(inputs);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * c.activations.back();
    z.colwise() += biases_[l];
    c.preacts.push_back(z);
    if (l + 1 < weights_.size()) {
      c.activations.push_back(z.cwiseMax(0.0));
    } else {
      c.activations.push_back(std::move(z));
    }
  }
  return c;
}

MlpGradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& output_grad) const {
  const auto& out = cache.output();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols()) {
    throw UsageError("output gradient shape does not match the cached batch");
  }
  MlpGradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(weights_.size());
  Eigen::MatrixXd delta = output_grad;
  for (std::size_t i = weights_.size(); i-- > 0;) {
    g.weights[i].noalias() = delta * cache.activations[i].transpose();
    g.biases[i] = delta.rowwise().sum();
    if (i == 0) break;
    Eigen::MatrixXd back = weights_[i].transpose() * delta;
    delta = back.cwiseProduct((cache.preacts[i - 1].array() > 0.0).cast<double>().matrix());
  }
  return g;
}

MlpGradients Mlp::zero_like() const {
  MlpGradients g;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

bool Mlp::operator==(const Mlp& other) const {
  if (sizes_ != other.sizes_) return false;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) return false;
  }
  return true;
}

LossAndGradients weighted_squared_error(const Mlp& model, const Eigen::MatrixXd& inputs,
                                        const Eigen::MatrixXd& targets, const Eigen::MatrixXd& weights) {
  if (inputs.cols() == 0) throw UsageError("empty batch");
  if (targets.rows() != model.output_dim() || targets.cols() != inputs.cols() || weights.rows() != targets.rows() ||
      weights.cols() != targets.cols()) {
    throw UsageError("target/weight shape does not match the model output");
  }
  const auto cache = model.forward_cached(inputs);
  const Eigen::MatrixXd err = cache.output() - targets;
  const double batch = static_cast<double>(inputs.cols());
  LossAndGradients out;
  out.loss = 0.5 * (weights.array() * err.array().square()).sum() / batch;
  const Eigen::MatrixXd dout = (weights.array() * err.array()).matrix() / batch;
  out.grads = model.backward(cache, dout);
  return out;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.layer_sizes() != online.layer_sizes()) throw UsageError("soft update between different shapes");
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("soft update tau must lie in [0, 1]");
  if (tau == 0.0) return;
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    if (tau == 1.0) {
      target.weight(l) = online.weight(l);
      target.bias(l) = online.bias(l);
    } else {
      target.weight(l) = tau * online.weight(l) + (1.0 - tau) * target.weight(l);
      target.bias(l) = tau * online.bias(l) + (1.0 - tau) * target.bias(l);
    }
  }
}

}  // namespace orl
