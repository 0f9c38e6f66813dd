#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbrl/scenario.hpp"

namespace sbrl {

inline constexpr std::size_t kDefaultMaxSteps = 10'000;

/// How the engine picks among enabled events at a synchronization point.
///
/// The canonical order everywhere is: scenarios in registration order, each
/// scenario's requested list in declaration order, duplicates collapsed onto
/// their first occurrence.
class SelectionPolicy {
 public:
  enum class Kind { FirstEnabled, SeededRandom, Priority };

  static SelectionPolicy first_enabled() { return SelectionPolicy(Kind::FirstEnabled); }
  static SelectionPolicy seeded_random() { return SelectionPolicy(Kind::SeededRandom); }
  static SelectionPolicy priority(std::map<std::string, int> priorities) {
    SelectionPolicy p(Kind::Priority);
    p.priorities_ = std::move(priorities);
    return p;
  }

  Kind kind() const { return kind_; }

  /// Events absent from the priority map rank at 0.
  int priority_of(const std::string& event) const {
    auto it = priorities_.find(event);
    return it == priorities_.end() ? 0 : it->second;
  }

  const char* name() const {
    switch (kind_) {
      case Kind::FirstEnabled: return "first";
      case Kind::SeededRandom: return "random";
      case Kind::Priority: return "priority";
    }
    return "?";
  }

 private:
  explicit SelectionPolicy(Kind k) : kind_(k) {}
  Kind kind_;
  std::map<std::string, int> priorities_;
};

/// Result of one selection attempt: a triggered event, or quiescence when
/// nothing was enabled.
struct StepOutcome {
  std::optional<Event> triggered;
  bool quiescent() const { return !triggered.has_value(); }
};

/// One engine-selected event together with the size of the enabled set it was
/// chosen from.
struct TriggeredStep {
  Event event;
  std::size_t enabled_count = 0;
};

struct StepBudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scenario was woken by an event it has no transition for. Unreachable for
/// validated programs unless a wait-all state meets an event outside the
/// program's alphabet.
struct MissingTransitionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A set of scenario programs run in lockstep. Value type: copying an
/// execution snapshots the whole run.
class Execution {
 public:
  Execution() = default;

  /// Registration order is the vector order; programs are validated here.
  explicit Execution(std::vector<ScenarioProgram> programs, std::uint64_t rng_seed = 0);

  /// Events requested by at least one alive scenario and blocked by none,
  /// in canonical order.
  std::vector<Event> enabled_events() const;

  /// True iff some alive scenario's current declaration blocks the event.
  bool is_blocked(const Event& event) const;

  /// Pick per policy from the enabled set; quiescent outcome when empty.
  /// Only a SeededRandom choice among two or more events consumes rng state.
  StepOutcome select_event(const SelectionPolicy& policy);

  /// Append the event to the trace and resume every scenario that requested
  /// or waited for it. The event need not be enabled.
  void advance(const Event& event);

  /// Select and advance until quiescent. Throws StepBudgetExceededError if
  /// events are still enabled after max_steps triggers.
  std::vector<TriggeredStep> run_to_completion(const SelectionPolicy& policy,
                                               std::size_t max_steps = kDefaultMaxSteps);

  /// Same loop as run_to_completion; the model then sits quiescent waiting
  /// for the next externally injected action event.
  std::vector<TriggeredStep> super_step(const SelectionPolicy& policy,
                                        std::size_t max_steps = kDefaultMaxSteps);

  /// For a quiescent model: report whether the action is blocked in the
  /// current state, then advance on it unconditionally.
  bool handle_agent_action(const Event& action);

  /// Back to every program's initial state, empty trace, reseeded rng.
  void reset();

  const std::vector<Event>& trace() const { return trace_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  std::size_t scenario_count() const { return scenarios_.size(); }
  const ScenarioProgram& program(std::size_t i) const { return scenarios_[i].program; }
  const std::string& current_state(std::size_t i) const { return scenarios_[i].state; }
  bool alive(std::size_t i) const { return scenarios_[i].alive; }

 private:
  struct Slot {
    ScenarioProgram program;
    std::string state;
    bool alive = true;
  };

  const SyncDeclaration& decl(const Slot& s) const { return s.program.declaration_at(s.state); }
  Event pick(const std::vector<Event>& enabled, const SelectionPolicy& policy);

  std::vector<Slot> scenarios_;
  std::vector<Event> trace_;
  std::uint64_t rng_seed_ = 0;
  std::mt19937_64 rng_;
};

/// Newline-delimited event names.
void write_event_lines(std::ostream& out, const std::vector<TriggeredStep>& steps);

/// CSV trace: step index, event name, selecting policy, enabled-set size.
void write_trace_csv(std::ostream& out, const std::vector<TriggeredStep>& steps,
                     const SelectionPolicy& policy);

}  // namespace sbrl
