#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbrl/engine.hpp"

namespace sbrl::shaping {

class UnknownActionError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Bijection between discrete action ids (0..n-1) and model event names.
class ActionMap {
 public:
  explicit ActionMap(std::vector<std::string> event_names);

  const Event& event_for(int action_id) const;
  int action_for(std::string_view event_name) const;
  int size() const { return static_cast<int>(events_.size()); }

 private:
  std::vector<Event> events_;
};

class InvalidPenaltyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters of the blocked-action penalty. A blocked action earns
/// `alpha * candidate - delta` instead of the candidate reward.
struct PenaltyConfig {
  double alpha = 0.0;
  double delta = 4.5;

  void validate() const;  ///< alpha must lie in [-1, 1], delta must be >= 0

  bool operator==(const PenaltyConfig&) const = default;
};

double shape_reward(double candidate_reward, bool blocked, const PenaltyConfig& cfg);

template <typename Obs>
struct ShapedStep {
  Obs observation;
  double reward = 0.0;            ///< shaped reward handed to the learner
  double candidate_reward = 0.0;  ///< unshaped reward from the environment
  bool blocked = false;
  bool done = false;
  std::vector<TriggeredStep> model_steps;  ///< events the model ran after the action
};

/// One orchestrated step: environment transition, blockedness check against
/// the model, penalty application, then the model runs to quiescence.
template <typename Env>
auto shaped_step(Env& env, Execution& exec, int action_id, const ActionMap& actions,
                 const PenaltyConfig& penalty, const SelectionPolicy& policy,
                 std::size_t max_steps = kDefaultMaxSteps)
    -> ShapedStep<decltype(env.reset())> {
  auto env_step = env.step(action_id);
  const bool blocked = exec.handle_agent_action(actions.event_for(action_id));
  ShapedStep<decltype(env.reset())> out;
  out.observation = env_step.observation;
  out.candidate_reward = env_step.reward;
  out.reward = shape_reward(env_step.reward, blocked, penalty);
  out.blocked = blocked;
  out.done = env_step.done;
  out.model_steps = exec.super_step(policy, max_steps);
  return out;
}

/// Environment wrapper that keeps a scenario model in lockstep with the
/// wrapped environment. An empty model never blocks, so the wrapper is
/// observationally identical to the bare environment in that case.
template <typename Env>
class ShapedEnv {
 public:
  using Observation = decltype(std::declval<Env&>().reset());

  ShapedEnv(Env env, std::vector<ScenarioProgram> programs, ActionMap actions,
            PenaltyConfig penalty, SelectionPolicy policy = SelectionPolicy::first_enabled(),
            std::uint64_t model_seed = 0, std::size_t max_steps = kDefaultMaxSteps)
      : env_(std::move(env)),
        exec_(std::move(programs), model_seed),
        actions_(std::move(actions)),
        penalty_(penalty),
        policy_(std::move(policy)),
        max_steps_(max_steps) {
    penalty_.validate();
  }

  Observation reset() {
    Observation obs = env_.reset();
    exec_.reset();
    exec_.super_step(policy_, max_steps_);
    return obs;
  }

  ShapedStep<Observation> step(int action_id) {
    return shaped_step(env_, exec_, action_id, actions_, penalty_, policy_, max_steps_);
  }

  Env& env() { return env_; }
  const Env& env() const { return env_; }
  Execution& model() { return exec_; }
  const Execution& model() const { return exec_; }
  const ActionMap& actions() const { return actions_; }

 private:
  Env env_;
  Execution exec_;
  ActionMap actions_;
  PenaltyConfig penalty_;
  SelectionPolicy policy_;
  std::size_t max_steps_;
};

}  // namespace sbrl::shaping
