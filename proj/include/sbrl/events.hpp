#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sbrl {

/// A named occurrence. Events compare equal iff their names are equal.
class Event {
 public:
  Event() = default;
  explicit Event(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  friend bool operator==(const Event& a, const Event& b) { return a.name_ == b.name_; }
  friend bool operator!=(const Event& a, const Event& b) { return a.name_ != b.name_; }
  friend bool operator<(const Event& a, const Event& b) { return a.name_ < b.name_; }

 private:
  std::string name_;
};

/// A set of events usable in declarations: an explicit list of names,
/// everything, or nothing.
class EventSet {
 public:
  enum class Kind { Explicit, All, None };

  EventSet() : kind_(Kind::None) {}

  static EventSet none() { return EventSet(); }

  static EventSet all() {
    EventSet s;
    s.kind_ = Kind::All;
    return s;
  }

  /// Explicit set; duplicate names collapse, first occurrence keeps its slot.
  static EventSet of(std::vector<std::string> names) {
    EventSet s;
    s.kind_ = Kind::Explicit;
    for (auto& n : names) {
      bool seen = false;
      for (const auto& have : s.names_)
        if (have == n) { seen = true; break; }
      if (!seen) s.names_.push_back(std::move(n));
    }
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_none() const { return kind_ == Kind::None; }
  bool is_all() const { return kind_ == Kind::All; }

  bool contains(std::string_view name) const {
    switch (kind_) {
      case Kind::All: return true;
      case Kind::None: return false;
      case Kind::Explicit:
        for (const auto& n : names_)
          if (n == name) return true;
        return false;
    }
    return false;
  }

  bool contains(const Event& e) const { return contains(e.name()); }

  /// Explicit members in declaration order; empty for All/None.
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const EventSet& a, const EventSet& b) {
    return a.kind_ == b.kind_ && a.names_ == b.names_;
  }

 private:
  Kind kind_;
  std::vector<std::string> names_;
};

}  // namespace sbrl
