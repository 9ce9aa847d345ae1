#include "orl/env/lander.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "orl/error.hpp"
#include "orl/random.hpp"

namespace orl {

namespace {
std::atomic<bool> g_live_env_allowed{true};
}

void set_live_environment_allowed(bool allowed) noexcept { g_live_env_allowed.store(allowed); }
bool live_environment_allowed() noexcept { return g_live_env_allowed.load(); }

void LanderConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string("lander: ") + name + " must be positive");
  };
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError(std::string("lander: ") + name + " must be non-negative");
  };
  positive(dt, "dt");
  nonneg(gravity, "gravity");
  nonneg(thrust_main, "thrust_main");
  nonneg(thrust_side, "thrust_side");
  nonneg(torque_side, "torque_side");
  if (step_budget <= 0) throw UsageError("lander: step_budget must be positive");
  if (action_repeat <= 0) throw UsageError("lander: action_repeat must be positive");
  positive(spawn_altitude, "spawn_altitude");
  nonneg(spawn_vx_range, "spawn_vx_range");
  nonneg(spawn_vy_range, "spawn_vy_range");
  nonneg(landing_bonus, "landing_bonus");
  nonneg(crash_penalty, "crash_penalty");
  positive(pad_half_width, "pad_half_width");
  positive(landing_vy_tol, "landing_vy_tol");
  positive(landing_theta_tol, "landing_theta_tol");
  positive(x_limit, "x_limit");
  if (!(y_limit > spawn_altitude)) throw UsageError("lander: y_limit must exceed spawn_altitude");
  nonneg(cost_main, "cost_main");
  nonneg(cost_side, "cost_side");
  nonneg(shaping_position, "shaping_position");
  nonneg(shaping_velocity, "shaping_velocity");
  nonneg(shaping_angle, "shaping_angle");
}

std::string LanderConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "dt=" << dt << ";gravity=" << gravity << ";thrust_main=" << thrust_main
     << ";thrust_side=" << thrust_side << ";torque_side=" << torque_side << ";step_budget=" << step_budget
     << ";action_repeat=" << action_repeat << ";spawn_altitude=" << spawn_altitude
     << ";spawn_vx_range=" << spawn_vx_range << ";spawn_vy_range=" << spawn_vy_range
     << ";landing_bonus=" << landing_bonus << ";crash_penalty=" << crash_penalty
     << ";pad_half_width=" << pad_half_width << ";landing_vy_tol=" << landing_vy_tol
     << ";landing_theta_tol=" << landing_theta_tol << ";x_limit=" << x_limit << ";y_limit=" << y_limit << ";cost_main=" << cost_main
     << ";cost_side=" << cost_side << ";shaping_position=" << shaping_position
     << ";shaping_velocity=" << shaping_velocity << ";shaping_angle=" << shaping_angle;
  return os.str();
}

std::string LanderConfig::hash() const { return hex64(fnv1a64(canonical())); }

LanderState LanderState::from_vector(const std::vector<double>& v) {
  if (v.size() != 8) throw UsageError("lander state vector must have length 8");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

double lander_shaping(const LanderState& s, const LanderConfig& c) noexcept {
  return -(c.shaping_position * std::hypot(s.x, s.y) + c.shaping_velocity * std::hypot(s.vx, s.vy) +
           c.shaping_angle * std::abs(s.theta));
}

LanderState lander_integrate(const LanderState& s, LanderAction action, const LanderConfig& c) noexcept {
  double ax = 0.0;
  double ay = -c.gravity;
  double alpha = 0.0;
  switch (action) {
    case LanderAction::noop:
      break;
    case LanderAction::main:
      ax += -std::sin(s.theta) * c.thrust_main;
      ay += std::cos(s.theta) * c.thrust_main;
      break;
    case LanderAction::left:
      ax += -std::cos(s.theta) * c.thrust_side;
      ay += -std::sin(s.theta) * c.thrust_side;
      alpha += c.torque_side;
      break;
    case LanderAction::right:
      ax += std::cos(s.theta) * c.thrust_side;
      ay += std::sin(s.theta) * c.thrust_side;
      alpha -= c.torque_side;
      break;
  }
  LanderState n = s;
  n.vx = s.vx + ax * c.dt;
  n.vy = s.vy + ay * c.dt;
  n.omega = s.omega + alpha * c.dt;
  n.x = s.x + n.vx * c.dt;
  n.y = s.y + n.vy * c.dt;
  n.theta = s.theta + n.omega * c.dt;
  return n;
}

Lander::Lander(LanderConfig config) : config_(config) {
  if (!live_environment_allowed()) {
    throw UsageError("live environment access is disabled for this command");
  }
  config_.validate();
}

LanderState Lander::reset(std::uint64_t seed) {
  Rng rng = make_rng(seed, "lander.spawn");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  state_ = LanderState{};
  state_.y = config_.spawn_altitude;
  const double ux = unit(rng);
  const double uy = unit(rng);
  state_.vx = config_.spawn_vx_range * ux;
  state_.vy = config_.spawn_vy_range * uy;
  steps_ = 0;
  done_ = false;
  return state_;
}

LanderStep Lander::step(int action) {
  if (action < 0 || action >= kLanderActionCount) {
    throw UsageError("lander action " + std::to_string(action) + " out of range");
  }
  return step(static_cast<LanderAction>(action));
}

LanderStep Lander::step(LanderAction action) {
  if (done_) throw UsageError("lander step after episode end");
  const LanderState before = state_;
  LanderStep out;
  double fuel = 0.0;
  for (int k = 0; k < config_.action_repeat; ++k) {
    state_ = lander_integrate(state_, action, config_);
    if (action == LanderAction::main) fuel -= config_.cost_main;
    if (action == LanderAction::left || action == LanderAction::right) fuel -= config_.cost_side;
    if (state_.y <= 0.0 || std::abs(state_.x) >= config_.x_limit || state_.y >= config_.y_limit) break;
  }
  ++steps_;

  const bool touchdown = state_.y <= 0.0;
  const bool out_of_bounds = std::abs(state_.x) >= config_.x_limit || state_.y >= config_.y_limit;
  if (touchdown) {
    state_.contact_left = 1.0;
    state_.contact_right = 1.0;
  }
  out.reward.state_based = lander_shaping(state_, config_) - lander_shaping(before, config_);
  out.reward.action_based = fuel;
  if (touchdown || out_of_bounds) {
    out.done = true;
    out.landed = touchdown && !out_of_bounds && std::abs(state_.x) < config_.pad_half_width &&
                 std::abs(state_.vy) < config_.landing_vy_tol && std::abs(state_.theta) < config_.landing_theta_tol;
    out.reward.terminal = out.landed ? config_.landing_bonus : -config_.crash_penalty;
  } else if (steps_ >= config_.step_budget) {
    out.done = true;
    out.truncated = true;
  }
  done_ = out.done;
  out.state = state_;
  return out;
}

}  // namespace orl
