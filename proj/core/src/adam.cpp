#include "orl/funcapprox/adam.hpp"

#include <cmath>

#include "orl/error.hpp"

namespace orl {

AdamState AdamState::for_model(const Mlp& model, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.first_moment = model.zero_like();
  s.second_moment = model.zero_like();
  return s;
}

void adam_step(Mlp& model, const MlpGradients& grads, AdamState& state) {
  if (grads.weights.size() != model.layer_count() || state.first_moment.weights.size() != model.layer_count()) {
    throw UsageError("Adam state or gradients do not match the model");
  }
  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseAbs2();
    param.array() -= c.step_size * (m.array() / correction1) / ((v.array() / correction2).sqrt() + c.epsilon);
  };
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    update(model.weight(l), grads.weights[l], state.first_moment.weights[l], state.second_moment.weights[l]);
    update(model.bias(l), grads.biases[l], state.first_moment.biases[l], state.second_moment.biases[l]);
  }
}

}  // namespace orl
