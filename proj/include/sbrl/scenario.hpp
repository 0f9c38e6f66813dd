#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbrl/events.hpp"

namespace sbrl {

/// A scenario's declaration at one synchronization point.
struct SyncDeclaration {
  std::vector<Event> requested;  // ordered, no duplicates
  EventSet waited_for = EventSet::none();
  EventSet blocked = EventSet::none();

  /// Terminal declarations can never be woken again.
  bool terminal() const { return requested.empty() && waited_for.is_none(); }

  /// Whether a triggered event resumes a scenario paused at this point.
  bool wakes_on(const Event& e) const {
    for (const auto& r : requested)
      if (r == e) return true;
    return waited_for.contains(e);
  }

  friend bool operator==(const SyncDeclaration&, const SyncDeclaration&) = default;
};

/// A scenario as a finite transition system over synchronization points.
struct ScenarioProgram {
  std::string name;
  std::vector<std::string> states;  // unique ids, in declaration order
  std::string initial;
  std::map<std::string, SyncDeclaration> declarations;            // state -> declaration
  std::map<std::pair<std::string, std::string>, std::string> transitions;  // (state, event) -> state

  const SyncDeclaration& declaration_at(const std::string& state) const {
    return declarations.at(state);
  }

  bool has_state(const std::string& id) const {
    for (const auto& s : states)
      if (s == id) return true;
    return false;
  }

  /// Every event name mentioned anywhere in the program.
  std::vector<std::string> alphabet() const;

  friend bool operator==(const ScenarioProgram&, const ScenarioProgram&) = default;
};

struct InvalidScenarioError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Structural checks; returns one message per problem, empty when valid.
///
/// A transition must exist for an event in a state exactly when that state
/// requests or waits for the event. Wait-all states are checked against the
/// program's own alphabet, since "all" cannot be enumerated.
std::vector<std::string> validate(const ScenarioProgram& program);

/// validate() or throw InvalidScenarioError listing every problem.
void validate_or_throw(const ScenarioProgram& program);

}  // namespace sbrl
