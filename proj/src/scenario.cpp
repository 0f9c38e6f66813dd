#include "sbrl/scenario.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sbrl {

std::vector<std::string> ScenarioProgram::alphabet() const {
  std::vector<std::string> out;
  auto add = [&out](const std::string& n) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  for (const auto& [state, decl] : declarations) {
    (void)state;
    for (const auto& e : decl.requested) add(e.name());
    for (const auto& n : decl.waited_for.names()) add(n);
    for (const auto& n : decl.blocked.names()) add(n);
  }
  for (const auto& [key, target] : transitions) {
    (void)target;
    add(key.second);
  }
  return out;
}

std::vector<std::string> validate(const ScenarioProgram& p) {
  std::vector<std::string> problems;
  auto fail = [&problems](const std::string& msg) { problems.push_back(msg); };

  if (p.name.empty()) fail("scenario has no name");
  if (p.states.empty()) fail("scenario '" + p.name + "' has no states");

  std::set<std::string> state_ids;
  for (const auto& s : p.states) {
    if (s.empty()) fail("scenario '" + p.name + "' has an empty state id");
    if (!state_ids.insert(s).second)
      fail("scenario '" + p.name + "': duplicate state id '" + s + "'");
  }

  if (!state_ids.count(p.initial))
    fail("scenario '" + p.name + "': initial state '" + p.initial + "' is not a declared state");

  for (const auto& s : p.states)
    if (!p.declarations.count(s))
      fail("scenario '" + p.name + "': state '" + s + "' has no declaration");
  for (const auto& [s, decl] : p.declarations) {
    (void)decl;
    if (!state_ids.count(s))
      fail("scenario '" + p.name + "': declaration for unknown state '" + s + "'");
  }

  for (const auto& [s, decl] : p.declarations) {
    std::set<std::string> req;
    for (const auto& e : decl.requested) {
      if (e.name().empty()) fail("scenario '" + p.name + "', state '" + s + "': empty event name");
      if (!req.insert(e.name()).second)
        fail("scenario '" + p.name + "', state '" + s + "': duplicate requested event '" +
             e.name() + "'");
    }
  }

  for (const auto& [key, target] : p.transitions) {
    const auto& [from, event] = key;
    if (!state_ids.count(from)) {
      fail("scenario '" + p.name + "': transition from unknown state '" + from + "'");
      continue;
    }
    if (!state_ids.count(target))
      fail("scenario '" + p.name + "', state '" + from + "': transition on '" + event +
           "' targets unknown state '" + target + "'");
    auto it = p.declarations.find(from);
    if (it != p.declarations.end() && !it->second.wakes_on(Event(event)))
      fail("scenario '" + p.name + "', state '" + from + "': transition on '" + event +
           "' which is neither requested nor waited for there");
  }

  // The other direction of the iff: everything that can wake the scenario in a
  // state must have a transition. Wait-all is checked against the alphabet.
  const auto alpha = p.alphabet();
  for (const auto& [s, decl] : p.declarations) {
    auto need = [&](const std::string& event) {
      if (!p.transitions.count({s, event}))
        fail("scenario '" + p.name + "', state '" + s + "': no transition for '" + event +
             "' although it can wake the scenario there");
    };
    for (const auto& e : decl.requested) need(e.name());
    if (decl.waited_for.is_all()) {
      for (const auto& n : alpha) need(n);
    } else {
      for (const auto& n : decl.waited_for.names()) need(n);
    }
  }

  return problems;
}

void validate_or_throw(const ScenarioProgram& p) {
  const auto problems = validate(p);
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "invalid scenario program";
  for (const auto& m : problems) msg << "\n  " << m;
  throw InvalidScenarioError(msg.str());
}

}  // namespace sbrl
