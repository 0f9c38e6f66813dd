#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sbrl::netsim {

/// Agent actions on the sending rate. Values double as discrete action ids.
enum class Action : int { IncreaseRate = 0, DecreaseRate = 1, KeepRate = 2 };

inline constexpr int kActionCount = 3;

const char* action_name(Action a);
Action action_from_id(int id);

class InvalidConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fluid model of a single bottleneck link with a finite queue.
struct LinkConfig {
  double capacity = 10.0;        ///< packets the link drains per step
  double base_latency = 4.0;     ///< latency of an empty queue, in steps
  double queue_capacity = 20.0;  ///< packets the buffer can hold
  double delta_rate = 0.05;      ///< multiplicative step applied by Increase/Decrease
  double min_rate = 1.0;
  double max_rate = 30.0;
  int episode_length = 400;
  double reward_throughput = 10.0;
  double reward_latency = 1.0;
  double reward_loss = 5.0;
  std::uint64_t rng_seed = 0;

  void validate() const;  ///< throws InvalidConfigError naming the offending field

  bool operator==(const LinkConfig&) const = default;
};

/// Normalized view of the link handed to the agent.
struct Observation {
  double throughput_ratio = 0.0;  ///< delivered / capacity
  double latency_ratio = 1.0;     ///< latency / base_latency
  double loss_rate = 0.0;         ///< dropped / sending rate
};

struct EnvStep {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

/// One step of the fluid dynamics, kept free of environment state so it can
/// be exercised directly.
struct LinkState {
  double rate = 0.0;
  double queue = 0.0;
};

struct DynamicsResult {
  LinkState state;
  double delivered = 0.0;
  double dropped = 0.0;
  double latency = 0.0;
};

DynamicsResult step_dynamics(const LinkConfig& cfg, const LinkState& state, Action action);

LinkState initial_link_state(const LinkConfig& cfg);

class NetSimEnv {
 public:
  explicit NetSimEnv(LinkConfig cfg);

  Observation reset();
  EnvStep step(Action action);
  EnvStep step(int action_id) { return step(action_from_id(action_id)); }

  const LinkConfig& config() const { return cfg_; }
  const LinkState& link_state() const { return state_; }
  int step_index() const { return step_index_; }

 private:
  LinkConfig cfg_;
  LinkState state_;
  int step_index_ = 0;
};

}  // namespace sbrl::netsim
