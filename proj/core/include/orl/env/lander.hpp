#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "orl/datastore/dataset.hpp"

namespace orl {

enum class LanderAction : int { noop = 0, left = 1, main = 2, right = 3 };
inline constexpr int kLanderActionCount = 4;

/// Simplified 2-D lander. Units are normalized so the spawn altitude is 1.
struct LanderConfig {
  double dt = 0.02;
  double gravity = 1.6;
  double thrust_main = 4.0;
  double thrust_side = 0.4;  // lateral acceleration of a side engine
  double torque_side = 0.05;  // angular acceleration of a side engine
  int step_budget = 500;  // agent decisions per episode
  int action_repeat = 1;  // physics substeps per decision

  double spawn_altitude = 1.0;
  double spawn_vx_range = 0.3;  // vx ~ U(-range, range)
  double spawn_vy_range = 0.2;

  double landing_bonus = 100.0;
  double crash_penalty = 100.0;
  double pad_half_width = 0.2;
  double landing_vy_tol = 0.5;
  double landing_theta_tol = 0.2;
  double x_limit = 2.0;  // leaving |x| < x_limit or y < y_limit ends the episode as a crash
  double y_limit = 3.0;

  double cost_main = 0.3;  // fuel per substep
  double cost_side = 0.03;
  double shaping_position = 100.0;
  double shaping_velocity = 100.0;
  double shaping_angle = 100.0;

  /// Throws UsageError on a non-physical configuration.
  void validate() const;
  /// Stable textual form used for the dataset's environment hash.
  std::string canonical() const;
  std::string hash() const;
};

struct LanderState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  double contact_left = 0.0;
  double contact_right = 0.0;

  std::vector<double> to_vector() const { return {x, y, vx, vy, theta, omega, contact_left, contact_right}; }
  static LanderState from_vector(const std::vector<double>& v);
  bool operator==(const LanderState&) const = default;
};

struct LanderStep {
  LanderState state;
  RewardComponents reward;
  bool done = false;
  bool truncated = false;
  bool landed = false;
};

/// Potential used by the state-based reward component: the negative weighted
/// sum of distance, speed and tilt magnitudes.
double lander_shaping(const LanderState& s, const LanderConfig& config) noexcept;

/// One semi-implicit Euler substep with the given action held. Pure.
LanderState lander_integrate(const LanderState& s, LanderAction action, const LanderConfig& config) noexcept;

/// Process-wide switch guarding live environment construction. Offline
/// commands turn it off so any accidental environment use fails loudly.
void set_live_environment_allowed(bool allowed) noexcept;
bool live_environment_allowed() noexcept;

class Lander {
 public:
  explicit Lander(LanderConfig config);

  const LanderConfig& config() const noexcept { return config_; }
  const LanderState& state() const noexcept { return state_; }
  int steps() const noexcept { return steps_; }
  bool done() const noexcept { return done_; }

  /// Spawns at (0, spawn_altitude) with velocities drawn from `seed`.
  LanderState reset(std::uint64_t seed);
  /// Throws UsageError once the episode is done.
  LanderStep step(LanderAction action);
  LanderStep step(int action);

 private:
  LanderConfig config_;
  LanderState state_;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace orl
