#include "sbrl/netsim.hpp"

#include <algorithm>

namespace sbrl::netsim {

const char* action_name(Action a) {
  switch (a) {
    case Action::IncreaseRate: return "IncreaseRate";
    case Action::DecreaseRate: return "DecreaseRate";
    case Action::KeepRate: return "KeepRate";
  }
  throw std::invalid_argument("action_name: unknown action id " +
                              std::to_string(static_cast<int>(a)));
}

Action action_from_id(int id) {
  if (id < 0 || id >= kActionCount)
    throw std::invalid_argument("action_from_id: id must be in [0, " +
                                std::to_string(kActionCount - 1) + "], got " + std::to_string(id));
  return static_cast<Action>(id);
}

void LinkConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfigError("LinkConfig: " + what); };
  if (!(capacity > 0.0)) fail("capacity must be positive");
  if (!(base_latency > 0.0)) fail("base_latency must be positive");
  if (!(queue_capacity >= 0.0)) fail("queue_capacity must be non-negative");
  if (!(delta_rate > 0.0 && delta_rate < 1.0)) fail("delta_rate must be in (0, 1)");
  if (!(min_rate > 0.0)) fail("min_rate must be positive");
  if (!(max_rate >= min_rate)) fail("max_rate must be >= min_rate");
  if (episode_length < 1) fail("episode_length must be at least 1");
  if (!(reward_throughput >= 0.0)) fail("reward_throughput must be non-negative");
  if (!(reward_latency >= 0.0)) fail("reward_latency must be non-negative");
  if (!(reward_loss >= 0.0)) fail("reward_loss must be non-negative");
}

LinkState initial_link_state(const LinkConfig& cfg) {
  return LinkState{(cfg.min_rate + cfg.max_rate) / 2.0, 0.0};
}

DynamicsResult step_dynamics(const LinkConfig& cfg, const LinkState& state, Action action) {
  double rate = state.rate;
  switch (action) {
    case Action::IncreaseRate: rate *= 1.0 + cfg.delta_rate; break;
    case Action::DecreaseRate: rate *= 1.0 - cfg.delta_rate; break;
    case Action::KeepRate: break;
  }
  rate = std::clamp(rate, cfg.min_rate, cfg.max_rate);

  const double raw_queue = state.queue + rate - cfg.capacity;
  const double dropped = std::max(0.0, raw_queue - cfg.queue_capacity);
  const double queue = std::clamp(raw_queue, 0.0, cfg.queue_capacity);
  const double delivered = rate - dropped;
  const double latency = cfg.base_latency + queue / cfg.capacity;

  DynamicsResult r;
  r.state = LinkState{rate, queue};
  r.delivered = delivered;
  r.dropped = dropped;
  r.latency = latency;
  return r;
}

NetSimEnv::NetSimEnv(LinkConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  state_ = initial_link_state(cfg_);
}

Observation NetSimEnv::reset() {
  state_ = initial_link_state(cfg_);
  step_index_ = 0;
  Observation obs;
  obs.throughput_ratio = std::clamp(state_.rate / cfg_.capacity, 0.0, 1.0);
  obs.latency_ratio = 1.0;
  obs.loss_rate = 0.0;
  return obs;
}

EnvStep NetSimEnv::step(Action action) {
  const DynamicsResult r = step_dynamics(cfg_, state_, action);
  state_ = r.state;

  EnvStep out;
  out.observation.throughput_ratio = r.delivered / cfg_.capacity;
  out.observation.latency_ratio = r.latency / cfg_.base_latency;
  out.observation.loss_rate = r.dropped / r.state.rate;
  out.reward = cfg_.reward_throughput * (r.delivered / cfg_.capacity) -
               cfg_.reward_latency * ((r.latency - cfg_.base_latency) / cfg_.base_latency) -
               cfg_.reward_loss * (r.dropped / r.state.rate);
  ++step_index_;
  out.done = step_index_ >= cfg_.episode_length;
  return out;
}

}  // namespace sbrl::netsim
