#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orl/datastore/dataset.hpp"

namespace orl {

/// Where a feature vector sits in the logged data: episode id and step index.
/// Noise features are a pure function of this position.
struct StreamPosition {
  std::int64_t episode = 0;
  std::int64_t step = 0;
};

/// A candidate state representation: a subset of the union vector plus
/// optional appended standard-normal noise features.
struct StateSpaceSpec {
  std::string name;
  std::vector<int> indices;
  int noise_dims = 0;
  std::string noise_stream = "noise";

  std::size_t dim() const noexcept { return indices.size() + static_cast<std::size_t>(noise_dims); }
  /// Throws UsageError if indices repeat or fall outside the union vector.
  void validate(std::size_t union_dim) const;

  bool operator==(const StateSpaceSpec&) const = default;
};

/// Projects `union_vec` onto `spec` and writes `spec.dim()` values to `out`.
void project_state_into(std::span<const double> union_vec, const StateSpaceSpec& spec,
                        StreamPosition position, std::span<double> out);
std::vector<double> project_state(std::span<const double> union_vec, const StateSpaceSpec& spec,
                                  StreamPosition position);

/// Smallest spec containing every candidate's features; evaluator input.
/// Candidates with noise must share one noise stream.
StateSpaceSpec union_space(const std::vector<StateSpaceSpec>& candidates, std::string name = "union");

/// True when every feature of `sub` appears in `context` in a way the
/// projection can recover.
bool is_projection_of(const StateSpaceSpec& sub, const StateSpaceSpec& context);

struct RewardSpec {
  std::string name;
  bool include_state_based = true;
  bool include_action_based = true;
  bool include_terminal = true;
  double state_weight = 1.0;
  double action_weight = 1.0;
  double terminal_weight = 1.0;

  void validate() const;

  bool operator==(const RewardSpec&) const = default;
};

double apply_reward_spec(const RewardComponents& components, const RewardSpec& spec) noexcept;

/// {x, y, vx, vy, theta, omega, contact_left, contact_right}
const std::vector<std::string>& lander_feature_names();

/// S_orig (all eight), S_more (eight plus two noise features), S_less (x, y dropped).
StateSpaceSpec lander_state_original();
StateSpaceSpec lander_state_more();
StateSpaceSpec lander_state_less();

/// f (all components), f_r1 (terminal), f_r2 (action + terminal), f_r3 (state + terminal).
RewardSpec reward_full();
RewardSpec reward_terminal_only();
RewardSpec reward_action_terminal();
RewardSpec reward_state_terminal();

}  // namespace orl
