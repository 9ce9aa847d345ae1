#include "orl/env/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "orl/error.hpp"
#include "orl/random.hpp"

namespace orl {

void StateSpaceSpec::validate(std::size_t union_dim) const {
  if (noise_dims < 0) throw UsageError("state space '" + name + "': negative noise_dims");
  std::set<int> seen;
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= union_dim) {
      throw UsageError("state space '" + name + "': index " + std::to_string(i) +
                       " outside union dimension " + std::to_string(union_dim));
    }
    if (!seen.insert(i).second) {
      throw UsageError("state space '" + name + "': duplicate index " + std::to_string(i));
    }
  }
  if (dim() == 0) throw UsageError("state space '" + name + "' is empty");
}

namespace {

// Box-Muller over a counter-based stream keyed by (stream, episode, step, k).
double noise_feature(std::uint64_t stream_key, StreamPosition pos, int k) {
  std::uint64_t key = mix64(stream_key ^ mix64(static_cast<std::uint64_t>(pos.episode)));
  key = mix64(key + static_cast<std::uint64_t>(pos.step) * 0x9e3779b97f4a7c15ULL);
  const int pair = k / 2;
  const std::uint64_t a = mix64(key + 2 * static_cast<std::uint64_t>(pair) + 1);
  const std::uint64_t b = mix64(key + 2 * static_cast<std::uint64_t>(pair) + 2);
  // 53-bit uniforms; u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (k % 2 == 0) ? r * std::cos(angle) : r * std::sin(angle);
}

}  // namespace

void project_state_into(std::span<const double> union_vec, const StateSpaceSpec& spec,
                        StreamPosition position, std::span<double> out) {
  if (out.size() != spec.dim()) throw UsageError("projection output buffer has wrong size");
  std::size_t j = 0;
  for (int i : spec.indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= union_vec.size()) {
      throw UsageError("state space '" + spec.name + "': index " + std::to_string(i) +
                       " outside union vector of length " + std::to_string(union_vec.size()));
    }
    out[j++] = union_vec[static_cast<std::size_t>(i)];
  }
  if (spec.noise_dims > 0) {
    const std::uint64_t stream_key = fnv1a64(spec.noise_stream);
    for (int k = 0; k < spec.noise_dims; ++k) out[j++] = noise_feature(stream_key, position, k);
  }
}

std::vector<double> project_state(std::span<const double> union_vec, const StateSpaceSpec& spec,
                                  StreamPosition position) {
  std::vector<double> out(spec.dim());
  project_state_into(union_vec, spec, position, out);
  return out;
}

StateSpaceSpec union_space(const std::vector<StateSpaceSpec>& candidates, std::string name) {
  if (candidates.empty()) throw UsageError("union of an empty candidate list");
  StateSpaceSpec u;
  u.name = std::move(name);
  std::set<int> all;
  const StateSpaceSpec* noisy = nullptr;
  for (const auto& c : candidates) {
    all.insert(c.indices.begin(), c.indices.end());
    if (c.noise_dims > 0) {
      if (noisy && noisy->noise_stream != c.noise_stream) {
        throw UsageError("candidates '" + noisy->name + "' and '" + c.name + "' use different noise streams");
      }
      if (!noisy || c.noise_dims > u.noise_dims) u.noise_dims = c.noise_dims;
      noisy = &c;
    }
  }
  u.indices.assign(all.begin(), all.end());
  if (noisy) u.noise_stream = noisy->noise_stream;
  return u;
}

bool is_projection_of(const StateSpaceSpec& sub, const StateSpaceSpec& context) {
  for (int i : sub.indices) {
    if (std::find(context.indices.begin(), context.indices.end(), i) == context.indices.end()) return false;
  }
  if (sub.noise_dims == 0) return true;
  return sub.noise_stream == context.noise_stream && sub.noise_dims <= context.noise_dims;
}

void RewardSpec::validate() const {
  if (!include_state_based && !include_action_based && !include_terminal) {
    throw UsageError("reward '" + name + "' includes no component");
  }
  if (!std::isfinite(state_weight) || !std::isfinite(action_weight) || !std::isfinite(terminal_weight)) {
    throw UsageError("reward '" + name + "' has a non-finite weight");
  }
}

double apply_reward_spec(const RewardComponents& c, const RewardSpec& spec) noexcept {
  double r = 0.0;
  if (spec.include_state_based) r += spec.state_weight * c.state_based;
  if (spec.include_action_based) r += spec.action_weight * c.action_based;
  if (spec.include_terminal) r += spec.terminal_weight * c.terminal;
  return r;
}

const std::vector<std::string>& lander_feature_names() {
  static const std::vector<std::string> names{"x",     "y",     "vx",           "vy",
                                              "theta", "omega", "contact_left", "contact_right"};
  return names;
}

StateSpaceSpec lander_state_original() { return {"S_orig", {0, 1, 2, 3, 4, 5, 6, 7}, 0, "noise"}; }
StateSpaceSpec lander_state_more() { return {"S_more", {0, 1, 2, 3, 4, 5, 6, 7}, 2, "noise"}; }
StateSpaceSpec lander_state_less() { return {"S_less", {2, 3, 4, 5, 6, 7}, 0, "noise"}; }

RewardSpec reward_full() { return {"f", true, true, true, 1.0, 1.0, 1.0}; }
RewardSpec reward_terminal_only() { return {"f_r1", false, false, true, 1.0, 1.0, 1.0}; }
RewardSpec reward_action_terminal() { return {"f_r2", false, true, true, 1.0, 1.0, 1.0}; }
RewardSpec reward_state_terminal() { return {"f_r3", true, false, true, 1.0, 1.0, 1.0}; }

}  // namespace orl
