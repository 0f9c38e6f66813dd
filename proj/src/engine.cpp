#include "sbrl/engine.hpp"

#include <ostream>
#include <unordered_set>

#include "sbrl/rng.hpp"

namespace sbrl {

Execution::Execution(std::vector<ScenarioProgram> programs, std::uint64_t rng_seed)
    : rng_seed_(rng_seed), rng_(rng_seed) {
  scenarios_.reserve(programs.size());
  for (auto& p : programs) {
    validate_or_throw(p);
    Slot slot;
    slot.state = p.initial;
    slot.program = std::move(p);
    slot.alive = !decl(slot).terminal();
    scenarios_.push_back(std::move(slot));
  }
}

std::vector<Event> Execution::enabled_events() const {
  std::vector<Event> out;
  std::unordered_set<std::string> seen;
  for (const auto& slot : scenarios_) {
    if (!slot.alive) continue;
    for (const auto& e : decl(slot).requested) {
      if (seen.count(e.name())) continue;
      seen.insert(e.name());
      if (!is_blocked(e)) out.push_back(e);
    }
  }
  return out;
}

bool Execution::is_blocked(const Event& event) const {
  for (const auto& slot : scenarios_)
    if (slot.alive && decl(slot).blocked.contains(event)) return true;
  return false;
}

Event Execution::pick(const std::vector<Event>& enabled, const SelectionPolicy& policy) {
  switch (policy.kind()) {
    case SelectionPolicy::Kind::SeededRandom:
      if (enabled.size() > 1) return enabled[uniform_below(rng_, enabled.size())];
      return enabled.front();
    case SelectionPolicy::Kind::Priority: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < enabled.size(); ++i)
        if (policy.priority_of(enabled[i].name()) > policy.priority_of(enabled[best].name()))
          best = i;
      return enabled[best];
    }
    case SelectionPolicy::Kind::FirstEnabled:
    default:
      return enabled.front();
  }
}

StepOutcome Execution::select_event(const SelectionPolicy& policy) {
  const auto enabled = enabled_events();
  if (enabled.empty()) return StepOutcome{};
  return StepOutcome{pick(enabled, policy)};
}

void Execution::advance(const Event& event) {
  trace_.push_back(event);
  for (auto& slot : scenarios_) {
    if (!slot.alive) continue;
    if (!decl(slot).wakes_on(event)) continue;
    auto it = slot.program.transitions.find({slot.state, event.name()});
    if (it == slot.program.transitions.end())
      throw MissingTransitionError("scenario '" + slot.program.name + "' woken by '" +
                                   event.name() + "' in state '" + slot.state +
                                   "' with no transition for it");
    slot.state = it->second;
    if (decl(slot).terminal()) slot.alive = false;
  }
}

std::vector<TriggeredStep> Execution::run_to_completion(const SelectionPolicy& policy,
                                                        std::size_t max_steps) {
  if (max_steps == 0) throw std::invalid_argument("run_to_completion: max_steps must be > 0");
  std::vector<TriggeredStep> out;
  for (;;) {
    const auto enabled = enabled_events();
    if (enabled.empty()) return out;
    if (out.size() >= max_steps)
      throw StepBudgetExceededError("step budget of " + std::to_string(max_steps) +
                                    " exhausted with events still enabled");
    const Event chosen = pick(enabled, policy);
    advance(chosen);
    out.push_back({chosen, enabled.size()});
  }
}

std::vector<TriggeredStep> Execution::super_step(const SelectionPolicy& policy,
                                                 std::size_t max_steps) {
  return run_to_completion(policy, max_steps);
}

bool Execution::handle_agent_action(const Event& action) {
  const bool was_blocked = is_blocked(action);
  advance(action);
  return was_blocked;
}

void Execution::reset() {
  for (auto& slot : scenarios_) {
    slot.state = slot.program.initial;
    slot.alive = !decl(slot).terminal();
  }
  trace_.clear();
  rng_.seed(rng_seed_);
}

void write_event_lines(std::ostream& out, const std::vector<TriggeredStep>& steps) {
  for (const auto& s : steps) out << s.event.name() << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TriggeredStep>& steps,
                     const SelectionPolicy& policy) {
  out << "step,event,policy,enabled_count\n";
  for (std::size_t i = 0; i < steps.size(); ++i)
    out << i << ',' << steps[i].event.name() << ',' << policy.name() << ','
        << steps[i].enabled_count << '\n';
}

}  // namespace sbrl
