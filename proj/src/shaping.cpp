#include "sbrl/shaping.hpp"

namespace sbrl::shaping {

ActionMap::ActionMap(std::vector<std::string> event_names) {
  if (event_names.empty()) throw std::invalid_argument("ActionMap: no events given");
  for (const auto& name : event_names) {
    if (name.empty()) throw std::invalid_argument("ActionMap: empty event name");
    for (const auto& have : events_)
      if (have.name() == name)
        throw std::invalid_argument("ActionMap: duplicate event name '" + name + "'");
    events_.emplace_back(name);
  }
}

const Event& ActionMap::event_for(int action_id) const {
  if (action_id < 0 || action_id >= size())
    throw UnknownActionError("ActionMap: action id " + std::to_string(action_id) +
                             " outside [0, " + std::to_string(size() - 1) + "]");
  return events_[static_cast<std::size_t>(action_id)];
}

int ActionMap::action_for(std::string_view event_name) const {
  for (int i = 0; i < size(); ++i)
    if (events_[static_cast<std::size_t>(i)].name() == event_name) return i;
  throw UnknownActionError("ActionMap: no action maps to event '" + std::string(event_name) + "'");
}

void PenaltyConfig::validate() const {
  if (!(alpha >= -1.0 && alpha <= 1.0))
    throw InvalidPenaltyError("PenaltyConfig: alpha must lie in [-1, 1], got " +
                              std::to_string(alpha));
  if (!(delta >= 0.0))
    throw InvalidPenaltyError("PenaltyConfig: delta must be >= 0, got " + std::to_string(delta));
}

double shape_reward(double candidate_reward, bool blocked, const PenaltyConfig& cfg) {
  if (!blocked) return candidate_reward;
  return cfg.alpha * candidate_reward - cfg.delta;
}

}  // namespace sbrl::shaping
