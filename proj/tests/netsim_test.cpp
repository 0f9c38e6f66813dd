#include "sbrl/netsim.hpp"

#include <cmath>

#include "doctest.h"

using namespace sbrl::netsim;
using doctest::Approx;

namespace {

// Equilibrium point of the default link: sending exactly at capacity with an
// empty queue. From here every hand-computed value below follows with pencil
// and paper.
LinkState at_capacity() { return LinkState{10.0, 0.0}; }

}  // namespace

TEST_CASE("config validation names the offending field") {
  auto expect = [](LinkConfig cfg, const char* fragment) {
    CHECK_THROWS_WITH_AS(cfg.validate(), fragment, InvalidConfigError);
  };
  LinkConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  cfg = {};
  cfg.capacity = 0.0;
  expect(cfg, "LinkConfig: capacity must be positive");
  cfg = {};
  cfg.base_latency = -1.0;
  expect(cfg, "LinkConfig: base_latency must be positive");
  cfg = {};
  cfg.queue_capacity = -0.5;
  expect(cfg, "LinkConfig: queue_capacity must be non-negative");
  cfg = {};
  cfg.delta_rate = 1.0;
  expect(cfg, "LinkConfig: delta_rate must be in (0, 1)");
  cfg = {};
  cfg.delta_rate = std::nan("");
  expect(cfg, "LinkConfig: delta_rate must be in (0, 1)");
  cfg = {};
  cfg.min_rate = 0.0;
  expect(cfg, "LinkConfig: min_rate must be positive");
  cfg = {};
  cfg.max_rate = 0.5;
  expect(cfg, "LinkConfig: max_rate must be >= min_rate");
  cfg = {};
  cfg.episode_length = 0;
  expect(cfg, "LinkConfig: episode_length must be at least 1");
  cfg = {};
  cfg.reward_throughput = -1.0;
  expect(cfg, "LinkConfig: reward_throughput must be non-negative");
  cfg = {};
  cfg.reward_latency = -1.0;
  expect(cfg, "LinkConfig: reward_latency must be non-negative");
  cfg = {};
  cfg.reward_loss = -1.0;
  expect(cfg, "LinkConfig: reward_loss must be non-negative");
}

TEST_CASE("action names and ids round-trip, bad ids throw") {
  for (int id = 0; id < kActionCount; ++id) {
    const Action a = action_from_id(id);
    CHECK(static_cast<int>(a) == id);
  }
  CHECK(action_name(Action::IncreaseRate) == std::string("IncreaseRate"));
  CHECK(action_name(Action::DecreaseRate) == std::string("DecreaseRate"));
  CHECK(action_name(Action::KeepRate) == std::string("KeepRate"));
  CHECK_THROWS_AS(action_from_id(-1), std::invalid_argument);
  CHECK_THROWS_AS(action_from_id(3), std::invalid_argument);
}

TEST_CASE("dynamics at the equilibrium point, worked by hand") {
  const LinkConfig cfg;

  SUBCASE("keep holds the rate and delivers exactly capacity") {
    const auto r = step_dynamics(cfg, at_capacity(), Action::KeepRate);
    CHECK(r.state.rate == Approx(10.0));
    CHECK(r.state.queue == Approx(0.0));
    CHECK(r.delivered == Approx(10.0));
    CHECK(r.dropped == Approx(0.0));
    CHECK(r.latency == Approx(4.0));
  }
  SUBCASE("increase overshoots into the queue") {
    const auto r = step_dynamics(cfg, at_capacity(), Action::IncreaseRate);
    CHECK(r.state.rate == Approx(10.5));
    CHECK(r.state.queue == Approx(0.5));
    CHECK(r.delivered == Approx(10.5));
    CHECK(r.dropped == Approx(0.0));
    CHECK(r.latency == Approx(4.05));
  }
  SUBCASE("decrease undershoots and keeps the queue empty") {
    const auto r = step_dynamics(cfg, at_capacity(), Action::DecreaseRate);
    CHECK(r.state.rate == Approx(9.5));
    CHECK(r.state.queue == Approx(0.0));
    CHECK(r.delivered == Approx(9.5));
    CHECK(r.dropped == Approx(0.0));
    CHECK(r.latency == Approx(4.0));
  }
}

TEST_CASE("one-step rewards at equilibrium make increase the myopic winner") {
  // This temptation is the point of the environment: greedy one-step reward
  // ranks Increase (10.4875) over Keep (10.0) over Decrease (9.5), so an
  // unguided learner is pulled toward rate growth it later pays for.
  LinkConfig cfg;
  cfg.min_rate = 1.0;
  cfg.max_rate = 19.0;  // reset midpoint lands exactly on capacity
  auto reward_of = [&cfg](Action a) {
    NetSimEnv fresh{cfg};
    fresh.reset();
    return fresh.step(a).reward;
  };
  const double inc = reward_of(Action::IncreaseRate);
  const double keep = reward_of(Action::KeepRate);
  const double dec = reward_of(Action::DecreaseRate);
  CHECK(inc == Approx(10.4875).epsilon(1e-12));
  CHECK(keep == Approx(10.0).epsilon(1e-12));
  CHECK(dec == Approx(9.5).epsilon(1e-12));
  CHECK(inc > keep);
  CHECK(keep > dec);
}

TEST_CASE("rate clamps at both ends of the allowed range") {
  LinkConfig cfg;
  const auto low = step_dynamics(cfg, LinkState{1.0, 0.0}, Action::DecreaseRate);
  CHECK(low.state.rate == Approx(cfg.min_rate));
  const auto high = step_dynamics(cfg, LinkState{30.0, 0.0}, Action::IncreaseRate);
  CHECK(high.state.rate == Approx(cfg.max_rate));
}

TEST_CASE("queue fills, saturates, and sheds drops beyond its capacity") {
  LinkConfig cfg;
  // rate pinned at 30 against capacity 10: queue grows 20 per step
  auto r = step_dynamics(cfg, LinkState{30.0, 0.0}, Action::KeepRate);
  CHECK(r.state.queue == Approx(20.0));
  CHECK(r.dropped == Approx(0.0));
  CHECK(r.delivered == Approx(30.0));

  r = step_dynamics(cfg, r.state, Action::KeepRate);
  CHECK(r.state.queue == Approx(20.0));  // saturated
  CHECK(r.dropped == Approx(20.0));
  CHECK(r.delivered == Approx(10.0));
  CHECK(r.latency == Approx(4.0 + 20.0 / 10.0));
}

TEST_CASE("drained below empty the queue floors at zero") {
  LinkConfig cfg;
  const auto r = step_dynamics(cfg, LinkState{2.0, 1.0}, Action::KeepRate);
  CHECK(r.state.queue == Approx(0.0));
  CHECK(r.delivered == Approx(2.0));
  CHECK(r.latency == Approx(cfg.base_latency));
}

TEST_CASE("arrivals are conserved between delivery, queue change, and drops") {
  LinkConfig cfg;
  std::uint64_t mix = 0x9e3779b97f4a7c15ull;
  LinkState s = initial_link_state(cfg);
  for (int i = 0; i < 500; ++i) {
    mix = mix * 6364136223846793005ull + 1442695040888963407ull;
    const auto a = static_cast<Action>(mix % 3);
    const auto r = step_dynamics(cfg, s, a);
    // backlog plus fresh arrivals either drain, stay queued, or drop
    const double raw = s.queue + r.state.rate - cfg.capacity;
    if (raw >= 0.0) {
      CHECK(s.queue + r.state.rate ==
            Approx(cfg.capacity + r.state.queue + r.dropped).epsilon(1e-9));
    } else {
      CHECK(r.state.queue == Approx(0.0));
      CHECK(r.dropped == Approx(0.0));
    }
    CHECK(r.delivered == Approx(r.state.rate - r.dropped).epsilon(1e-9));
    CHECK(r.state.queue >= 0.0);
    CHECK(r.state.queue <= cfg.queue_capacity);
    CHECK(r.state.rate >= cfg.min_rate);
    CHECK(r.state.rate <= cfg.max_rate);
    CHECK(r.dropped >= 0.0);
    s = r.state;
  }
}

TEST_CASE("from a fixed state, latency orders with the rate action chosen") {
  LinkConfig cfg;
  std::uint64_t mix = 0x853c49e6748fea9bull;
  for (int i = 0; i < 400; ++i) {
    mix = mix * 6364136223846793005ull + 1442695040888963407ull;
    const double rate =
        cfg.min_rate + (mix % 1000) / 999.0 * (cfg.max_rate - cfg.min_rate);
    mix = mix * 6364136223846793005ull + 1442695040888963407ull;
    const double queue = (mix % 1000) / 999.0 * cfg.queue_capacity;
    const LinkState s{rate, queue};
    const auto inc = step_dynamics(cfg, s, Action::IncreaseRate);
    const auto keep = step_dynamics(cfg, s, Action::KeepRate);
    const auto dec = step_dynamics(cfg, s, Action::DecreaseRate);
    CHECK(inc.latency >= keep.latency);
    CHECK(dec.latency <= keep.latency);
  }
}

TEST_CASE("environment counts steps and raises done exactly at the horizon") {
  LinkConfig cfg;
  cfg.episode_length = 5;
  NetSimEnv env{cfg};
  env.reset();
  for (int i = 0; i < 4; ++i) CHECK_FALSE(env.step(Action::KeepRate).done);
  CHECK(env.step(Action::KeepRate).done);
  CHECK(env.step_index() == 5);
}

TEST_CASE("reset restores the midpoint rate and a clean observation") {
  LinkConfig cfg;
  NetSimEnv env{cfg};
  for (int i = 0; i < 50; ++i) env.step(Action::IncreaseRate);
  const auto obs = env.reset();
  CHECK(env.link_state().rate == Approx((cfg.min_rate + cfg.max_rate) / 2.0));
  CHECK(env.link_state().queue == Approx(0.0));
  CHECK(env.step_index() == 0);
  CHECK(obs.throughput_ratio == Approx(1.0));  // midpoint 15.5 clamps to 1
  CHECK(obs.latency_ratio == Approx(1.0));
  CHECK(obs.loss_rate == Approx(0.0));
}

TEST_CASE("observations stay in their normalized ranges under any policy") {
  LinkConfig cfg;
  NetSimEnv env{cfg};
  env.reset();
  std::uint64_t mix = 12345;
  for (int i = 0; i < 1000; ++i) {
    mix = mix * 6364136223846793005ull + 1442695040888963407ull;
    const auto out = env.step(static_cast<int>(mix % 3));
    CHECK(out.observation.throughput_ratio >= 0.0);
    CHECK(out.observation.throughput_ratio <= cfg.max_rate / cfg.capacity);
    CHECK(out.observation.latency_ratio >= 1.0);
    CHECK(out.observation.latency_ratio <= 1.0 + cfg.queue_capacity / (cfg.capacity * cfg.base_latency));
    CHECK(out.observation.loss_rate >= 0.0);
    CHECK(out.observation.loss_rate <= 1.0);
    if (out.done) env.reset();
  }
}

TEST_CASE("invalid config is rejected at construction") {
  LinkConfig cfg;
  cfg.capacity = -1.0;
  CHECK_THROWS_AS(NetSimEnv{cfg}, InvalidConfigError);
}
