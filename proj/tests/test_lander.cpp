#include <cmath>

#include "doctest.h"
#include "orl/env/lander.hpp"
#include "orl/error.hpp"
#include "orl/online/audit.hpp"

using orl::Lander;
using orl::LanderAction;
using orl::LanderConfig;
using orl::LanderState;

namespace {

LanderConfig still_spawn() {
  LanderConfig c;
  c.spawn_vx_range = 0.0;
  c.spawn_vy_range = 0.0;
  return c;
}

}  // namespace

TEST_CASE("reset with zero perturbation spawns at rest above the origin") {
  Lander env(still_spawn());
  const LanderState s = env.reset(7);
  CHECK(s == LanderState{0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  CHECK_FALSE(env.done());
}

TEST_CASE("reset is deterministic per seed and differs across seeds") {
  Lander a(LanderConfig{});
  Lander b(LanderConfig{});
  const LanderState s7 = a.reset(7);
  CHECK(s7 == b.reset(7));
  const LanderState s8 = b.reset(8);
  CHECK((s7.vx != s8.vx || s7.vy != s8.vy));
  CHECK(s8.y == 1.0);
  CHECK(std::abs(s8.vx) <= LanderConfig{}.spawn_vx_range);
  CHECK(std::abs(s8.vy) <= LanderConfig{}.spawn_vy_range);
}

TEST_CASE("free fall changes vy by exactly -g dt") {
  const LanderConfig c;
  LanderState s{0.1, 0.8, 0.05, -0.3, 0.0, 0.0, 0.0, 0.0};
  const LanderState n = orl::lander_integrate(s, LanderAction::noop, c);
  CHECK(n.vy == s.vy - c.gravity * c.dt);
  CHECK(n.vx == s.vx);
  CHECK(n.y == s.y + n.vy * c.dt);
}

TEST_CASE("main engine upright adds (thrust - g) dt to vy") {
  const LanderConfig c;
  LanderState s{0.0, 0.5, 0.0, -0.2, 0.0, 0.0, 0.0, 0.0};
  const LanderState n = orl::lander_integrate(s, LanderAction::main, c);
  CHECK(n.vy == doctest::Approx(s.vy + (c.thrust_main - c.gravity) * c.dt).epsilon(1e-15));
  CHECK(n.vx == 0.0);
}

TEST_CASE("side engines push sideways and spin in opposite senses") {
  const LanderConfig c;
  const LanderState s{};
  const LanderState l = orl::lander_integrate(s, LanderAction::left, c);
  const LanderState r = orl::lander_integrate(s, LanderAction::right, c);
  CHECK(l.vx == doctest::Approx(-c.thrust_side * c.dt));
  CHECK(r.vx == doctest::Approx(c.thrust_side * c.dt));
  CHECK(l.omega == doctest::Approx(c.torque_side * c.dt));
  CHECK(r.omega == doctest::Approx(-c.torque_side * c.dt));
}

TEST_CASE("slow upright touchdown on the pad earns the landing bonus") {
  LanderConfig c = still_spawn();
  c.spawn_altitude = 0.0005;
  Lander env(c);
  env.reset(1);
  const orl::LanderStep st = env.step(LanderAction::noop);
  CHECK(st.done);
  CHECK(st.landed);
  CHECK_FALSE(st.truncated);
  CHECK(st.reward.terminal == c.landing_bonus);
  CHECK(st.state.contact_left == 1.0);
  CHECK(st.state.contact_right == 1.0);
}

TEST_CASE("fast touchdown is a crash") {
  LanderConfig c = still_spawn();
  c.spawn_altitude = 2.0;
  c.y_limit = 3.0;
  Lander env(c);
  env.reset(1);
  orl::LanderStep st;
  while (!env.done()) st = env.step(LanderAction::noop);
  CHECK_FALSE(st.landed);
  CHECK(st.reward.terminal == -c.crash_penalty);
}

TEST_CASE("leaving the bounds ends the episode as a crash") {
  LanderConfig c = still_spawn();
  Lander env(c);
  env.reset(1);
  orl::LanderStep st;
  while (!env.done()) st = env.step(LanderAction::main);
  CHECK(st.state.y >= c.y_limit);
  CHECK_FALSE(st.truncated);
  CHECK(st.reward.terminal == -c.crash_penalty);
}

TEST_CASE("step budget truncates with zero terminal reward") {
  LanderConfig c = still_spawn();
  c.step_budget = 5;
  Lander env(c);
  env.reset(1);
  orl::LanderStep st;
  int n = 0;
  while (!env.done()) {
    st = env.step(LanderAction::noop);
    ++n;
  }
  CHECK(n == 5);
  CHECK(st.truncated);
  CHECK(st.reward.terminal == 0.0);
}

TEST_CASE("stepping after the episode ends is rejected") {
  LanderConfig c = still_spawn();
  c.step_budget = 1;
  Lander env(c);
  env.reset(1);
  env.step(LanderAction::noop);
  CHECK_THROWS_AS(env.step(LanderAction::noop), orl::UsageError);
  CHECK_THROWS_AS(env.step(9), orl::UsageError);
}

TEST_CASE("fuel costs are charged per substep") {
  LanderConfig c = still_spawn();
  c.action_repeat = 3;
  Lander env(c);
  env.reset(1);
  CHECK(env.step(LanderAction::main).reward.action_based == doctest::Approx(-3 * c.cost_main));
  CHECK(env.step(LanderAction::left).reward.action_based == doctest::Approx(-3 * c.cost_side));
  CHECK(env.step(LanderAction::noop).reward.action_based == 0.0);
}

TEST_CASE("shaping telescopes and the composite equals the component sum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LanderConfig c;
    Lander env(c);
    const LanderState s0 = env.reset(seed);
    orl::Rng rng(seed);
    double shaping_sum = 0.0;
    LanderState last = s0;
    while (!env.done()) {
      const orl::LanderStep st = env.step(static_cast<int>(rng() % 4));
      shaping_sum += st.reward.state_based;
      const double f = orl::apply_reward_spec(st.reward, orl::reward_full());
      CHECK(f == doctest::Approx(st.reward.state_based + st.reward.action_based + st.reward.terminal));
      last = st.state;
    }
    CHECK(shaping_sum == doctest::Approx(orl::lander_shaping(last, c) - orl::lander_shaping(s0, c)).epsilon(1e-9));
  }
}

TEST_CASE("identical seeds and actions give bit-identical trajectories") {
  auto run = [](std::uint64_t seed) {
    Lander env(LanderConfig{});
    env.reset(seed);
    orl::Rng rng(99);
    std::vector<double> trace;
    while (!env.done()) {
      const auto st = env.step(static_cast<int>(rng() % 4));
      for (double v : st.state.to_vector()) trace.push_back(v);
      trace.push_back(st.reward.state_based);
    }
    return trace;
  };
  CHECK(run(5) == run(5));
}

TEST_CASE("invalid configurations are rejected") {
  LanderConfig c;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), orl::UsageError);
  c = LanderConfig{};
  c.action_repeat = 0;
  CHECK_THROWS_AS(c.validate(), orl::UsageError);
  c = LanderConfig{};
  c.y_limit = 0.5;
  CHECK_THROWS_AS(c.validate(), orl::UsageError);
}

TEST_CASE("environment hash tracks the constants") {
  LanderConfig a;
  LanderConfig b;
  CHECK(a.hash() == b.hash());
  b.gravity = 1.7;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("live environment guard blocks construction") {
  orl::set_live_environment_allowed(false);
  CHECK_THROWS_AS(Lander(LanderConfig{}), orl::UsageError);
  orl::set_live_environment_allowed(true);
  CHECK_NOTHROW(Lander(LanderConfig{}));
}

TEST_CASE("audit of a scripted controller lands every time") {
  const LanderConfig c;
  const auto result = orl::audit_online(
      [&](const LanderState& s, orl::StreamPosition, orl::Rng&) { return orl::scripted_lander_action(s, c); }, c, 50,
      3);
  CHECK(result.landing_rate() == 1.0);
  // Landing bonus plus the shaping recovered from the spawn potential, less
  // fuel; shaping slack of 20 allows for residual speed at touchdown.
  CHECK(result.mean_return() >= c.landing_bonus - 20.0);
  CHECK(result.episodes.size() == 50);
}

TEST_CASE("state vectors round trip") {
  const LanderState s{1, 2, 3, 4, 5, 6, 0, 1};
  CHECK(LanderState::from_vector(s.to_vector()) == s);
  CHECK_THROWS_AS(LanderState::from_vector({1, 2}), orl::UsageError);
}
