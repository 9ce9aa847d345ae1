#pragma once

#include <cstdint>

#include "orl/funcapprox/mlp.hpp"

namespace orl {

struct AdamConfig {
  double step_size = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  MlpGradients first_moment;
  MlpGradients second_moment;
  std::uint64_t step = 0;

  static AdamState for_model(const Mlp& model, AdamConfig config = {});
};

/// One bias-corrected Adam update of `model` in place.
void adam_step(Mlp& model, const MlpGradients& grads, AdamState& state);

}  // namespace orl
