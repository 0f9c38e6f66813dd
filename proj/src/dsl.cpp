#include "sbrl/dsl.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>

namespace sbrl::dsl {

namespace {

using Severity = ParseDiagnostic::Severity;

struct Pos {
  int line = 1;
  int column = 1;
};

struct Piece {
  std::string text;
  Pos pos;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Trimmed piece plus its 1-based column within the original line.
Piece trimmed(const std::string& line_text, std::size_t begin, std::size_t end, int line_no) {
  while (begin < end && is_space(line_text[begin])) ++begin;
  while (end > begin && is_space(line_text[end - 1])) --end;
  return Piece{line_text.substr(begin, end - begin), Pos{line_no, static_cast<int>(begin) + 1}};
}

std::vector<Piece> split_commas(const std::string& line_text, std::size_t begin, std::size_t end,
                                int line_no) {
  std::vector<Piece> out;
  std::size_t item_start = begin;
  for (std::size_t i = begin; i <= end; ++i) {
    if (i == end || line_text[i] == ',') {
      out.push_back(trimmed(line_text, item_start, i, line_no));
      item_start = i + 1;
    }
  }
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (is_space(c) || c == ',' || c == '#' || c == '*') return false;
  return true;
}

struct StateDraft {
  std::string id;
  Pos pos;
  bool initial = false;
  std::vector<Piece> requested;
  std::vector<Piece> waited;
  bool wait_all = false;
  Pos wait_all_pos;
  std::vector<Piece> blocked;
  std::map<std::string, std::pair<Piece, Piece>> transitions;  // event -> (event piece, target piece)
};

struct Parser {
  const std::string& text;
  std::vector<ParseDiagnostic> diagnostics;

  std::string scenario_name;
  bool saw_scenario = false;
  std::vector<StateDraft> states;

  explicit Parser(const std::string& t) : text(t) {}

  void error(Pos p, std::string msg) {
    diagnostics.push_back({p.line, p.column, std::move(msg), Severity::Error});
  }
  void warning(Pos p, std::string msg) {
    diagnostics.push_back({p.line, p.column, std::move(msg), Severity::Warning});
  }

  StateDraft* current_state() { return states.empty() ? nullptr : &states.back(); }

  void handle_line(const std::string& line_text, int line_no) {
    std::size_t end = line_text.find('#');
    if (end == std::string::npos) end = line_text.size();

    std::size_t start = 0;
    while (start < end && is_space(line_text[start])) ++start;
    if (start >= end) return;

    std::size_t kw_end = start;
    while (kw_end < end && !is_space(line_text[kw_end])) ++kw_end;
    const std::string keyword = line_text.substr(start, kw_end - start);
    const Pos kw_pos{line_no, static_cast<int>(start) + 1};
    const Piece rest = trimmed(line_text, kw_end, end, line_no);

    if (!saw_scenario && keyword != "scenario") {
      error(kw_pos, "expected 'scenario <name>' as the first directive");
      saw_scenario = true;  // report once, keep going for more diagnostics
      scenario_name = "<unnamed>";
    }

    if (keyword == "scenario") {
      if (saw_scenario && !scenario_name.empty() && scenario_name != "<unnamed>") {
        error(kw_pos, "duplicate 'scenario' directive");
        return;
      }
      saw_scenario = true;
      if (!valid_name(rest.text)) {
        error(rest.text.empty() ? kw_pos : rest.pos, "missing or invalid scenario name");
        scenario_name = "<unnamed>";
      } else {
        scenario_name = rest.text;
      }
    } else if (keyword == "state") {
      std::istringstream words(rest.text);
      std::string id, extra;
      words >> id;
      bool initial = false;
      if (words >> extra) {
        if (extra == "initial")
          initial = true;
        else
          error(rest.pos, "unexpected token '" + extra + "' after state id");
        std::string more;
        if (words >> more) error(rest.pos, "unexpected token '" + more + "' after state id");
      }
      if (!valid_name(id)) {
        error(rest.text.empty() ? kw_pos : rest.pos, "missing or invalid state id");
        return;
      }
      for (const auto& s : states)
        if (s.id == id) error(rest.pos, "duplicate state id '" + id + "'");
      StateDraft draft;
      draft.id = id;
      draft.pos = kw_pos;
      draft.initial = initial;
      states.push_back(std::move(draft));
    } else if (keyword == "request" || keyword == "wait" || keyword == "block") {
      StateDraft* st = current_state();
      if (!st) {
        error(kw_pos, "'" + keyword + "' outside a state");
        return;
      }
      if (keyword == "wait" && rest.text == "*") {
        st->wait_all = true;
        st->wait_all_pos = rest.pos;
        return;
      }
      auto items = split_commas(line_text, kw_end, end, line_no);
      for (auto& item : items) {
        if (item.text == "*") {
          error(item.pos, "'*' must be the only item in a wait list");
          continue;
        }
        if (!valid_name(item.text)) {
          error(item.pos, "missing or invalid event name");
          continue;
        }
        if (keyword == "request") {
          for (const auto& have : st->requested)
            if (have.text == item.text)
              error(item.pos,
                    "duplicate requested event '" + item.text + "' in state '" + st->id + "'");
          st->requested.push_back(item);
        } else if (keyword == "wait") {
          st->waited.push_back(item);
        } else {
          st->blocked.push_back(item);
        }
      }
    } else if (keyword == "on") {
      StateDraft* st = current_state();
      if (!st) {
        error(kw_pos, "'on' outside a state");
        return;
      }
      const auto arrow = rest.text.find("->");
      if (arrow == std::string::npos) {
        error(rest.pos, "expected '<event> -> <state>' after 'on'");
        return;
      }
      // positions of the two halves inside the original line
      const std::size_t rest_off = static_cast<std::size_t>(rest.pos.column) - 1;
      Piece ev = trimmed(line_text, rest_off, rest_off + arrow, line_no);
      Piece target = trimmed(line_text, rest_off + arrow + 2,
                             rest_off + rest.text.size(), line_no);
      if (!valid_name(ev.text)) {
        error(ev.text.empty() ? rest.pos : ev.pos, "missing or invalid event in transition");
        return;
      }
      if (!valid_name(target.text)) {
        error(target.text.empty() ? rest.pos : target.pos,
              "missing or invalid target state in transition");
        return;
      }
      if (st->transitions.count(ev.text)) {
        error(ev.pos, "duplicate transition on '" + ev.text + "' in state '" + st->id + "'");
        return;
      }
      st->transitions.emplace(ev.text, std::make_pair(ev, target));
    } else {
      error(kw_pos, "unknown directive '" + keyword + "'");
    }
  }

  ParseResult finish() {
    ParseResult result;

    int initial_count = 0;
    std::string initial_id;
    for (const auto& st : states) {
      if (st.initial) {
        ++initial_count;
        if (initial_count == 1)
          initial_id = st.id;
        else
          error(st.pos, "multiple states marked 'initial'");
      }
    }
    if (!states.empty() && initial_count == 0)
      error(states.front().pos, "no state marked 'initial'");
    if (saw_scenario && states.empty()) error(Pos{1, 1}, "scenario has no states");

    // cross-state checks and program assembly
    ScenarioProgram program;
    program.name = scenario_name;
    program.initial = initial_id;
    std::set<std::string> state_ids;
    for (const auto& st : states) state_ids.insert(st.id);

    std::set<std::string> alphabet;
    for (const auto& st : states) {
      for (const auto& p : st.requested) alphabet.insert(p.text);
      for (const auto& p : st.waited) alphabet.insert(p.text);
      for (const auto& p : st.blocked) alphabet.insert(p.text);
      for (const auto& [ev, pieces] : st.transitions) {
        (void)pieces;
        alphabet.insert(ev);
      }
    }

    for (const auto& st : states) {
      SyncDeclaration decl;
      auto declared = [&st](const std::string& ev) {
        if (st.wait_all) return true;
        for (const auto& p : st.requested)
          if (p.text == ev) return true;
        for (const auto& p : st.waited)
          if (p.text == ev) return true;
        return false;
      };

      for (const auto& p : st.requested) decl.requested.emplace_back(p.text);
      if (st.wait_all) {
        decl.waited_for = EventSet::all();
      } else if (!st.waited.empty()) {
        std::vector<std::string> names;
        for (const auto& p : st.waited) names.push_back(p.text);
        decl.waited_for = EventSet::of(std::move(names));
      }
      if (!st.blocked.empty()) {
        std::vector<std::string> names;
        for (const auto& p : st.blocked) names.push_back(p.text);
        decl.blocked = EventSet::of(std::move(names));
      }

      for (const auto& [ev, pieces] : st.transitions) {
        const auto& [ev_piece, target_piece] = pieces;
        if (!declared(ev))
          error(ev_piece.pos, "transition on '" + ev + "' which is neither requested nor waited for in state '" +
                                  st.id + "'");
        if (!state_ids.count(target_piece.text))
          error(target_piece.pos, "transition targets unknown state '" + target_piece.text + "'");
        program.transitions[{st.id, ev}] = target_piece.text;
      }

      // the other direction: everything that can wake the state needs a transition
      auto needs = [&](const std::string& ev, Pos at, const char* how) {
        if (!st.transitions.count(ev))
          error(at, std::string("state '") + st.id + "' " + how + " '" + ev +
                        "' but has no transition for it");
      };
      for (const auto& p : st.requested) needs(p.text, p.pos, "requests");
      if (st.wait_all) {
        for (const auto& ev : alphabet)
          if (!st.transitions.count(ev))
            error(st.wait_all_pos, "state '" + st.id +
                                       "' waits for all events but has no transition for '" + ev +
                                       "'");
      } else {
        for (const auto& p : st.waited) needs(p.text, p.pos, "waits for");
      }

      program.states.push_back(st.id);
      program.declarations.emplace(st.id, std::move(decl));
    }

    // reachability warning
    if (initial_count == 1 && !states.empty()) {
      std::set<std::string> reached{initial_id};
      bool grew = true;
      while (grew) {
        grew = false;
        for (const auto& [key, target] : program.transitions) {
          if (reached.count(key.first) && !reached.count(target)) {
            reached.insert(target);
            grew = true;
          }
        }
      }
      for (const auto& st : states)
        if (!reached.count(st.id))
          warning(st.pos, "state '" + st.id + "' is unreachable from the initial state");
    }

    result.diagnostics = std::move(diagnostics);
    for (const auto& d : result.diagnostics)
      if (d.severity == Severity::Error) return result;

    assert(validate(program).empty());
    result.program = std::move(program);
    return result;
  }
};

}  // namespace

ParseResult parse_scenario(const ScenarioSource& src) {
  if (src.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    ParseResult r;
    r.diagnostics.push_back({1, 1, "empty scenario source", Severity::Error});
    return r;
  }

  Parser parser(src.text);
  std::string line;
  int line_no = 0;
  std::istringstream stream(src.text);
  while (std::getline(stream, line)) {
    ++line_no;
    parser.handle_line(line, line_no);
  }
  return parser.finish();
}

std::string render_scenario(const ScenarioProgram& p) {
  std::ostringstream out;
  out << "scenario " << p.name << "\n";
  for (const auto& id : p.states) {
    out << "state " << id;
    if (id == p.initial) out << " initial";
    out << "\n";
    const auto& decl = p.declaration_at(id);
    auto list = [&out](const char* kw, const std::vector<std::string>& names) {
      out << "  " << kw << " ";
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out << ", ";
        out << names[i];
      }
      out << "\n";
    };
    if (!decl.requested.empty()) {
      std::vector<std::string> names;
      for (const auto& e : decl.requested) names.push_back(e.name());
      list("request", names);
    }
    if (decl.waited_for.is_all())
      out << "  wait *\n";
    else if (!decl.waited_for.names().empty())
      list("wait", decl.waited_for.names());
    if (decl.blocked.is_all())
      out << "  block *\n";  // unreachable from the parser; kept for completeness
    else if (!decl.blocked.names().empty())
      list("block", decl.blocked.names());
    for (const auto& [key, target] : p.transitions)
      if (key.first == id) out << "  on " << key.second << " -> " << target << "\n";
  }
  return out.str();
}

std::string format_diagnostic(const ScenarioSource& src, const ParseDiagnostic& d) {
  std::ostringstream out;
  out << src.origin_name << ':' << d.line << ':' << d.column << ": "
      << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
  return out.str();
}

ScenarioProgram avoid_k_in_a_row(const std::string& event, int k,
                                 const std::vector<std::string>& reset_events) {
  if (k < 2)
    throw InvalidScenarioError("avoid_k_in_a_row: k must be >= 2, got " + std::to_string(k));
  for (const auto& r : reset_events)
    if (r == event)
      throw InvalidScenarioError("avoid_k_in_a_row: '" + event +
                                 "' cannot be one of its own reset events");

  ScenarioProgram p;
  p.name = "avoid-" + std::to_string(k) + "-" + event;
  std::vector<std::string> watched{event};
  watched.insert(watched.end(), reset_events.begin(), reset_events.end());

  auto state_id = [](int i) { return "seen" + std::to_string(i); };
  for (int i = 0; i < k; ++i) {
    const std::string id = state_id(i);
    p.states.push_back(id);
    SyncDeclaration decl;
    decl.waited_for = EventSet::of(watched);
    if (i == k - 1) decl.blocked = EventSet::of({event});
    p.declarations.emplace(id, std::move(decl));
    p.transitions[{id, event}] = state_id(std::min(i + 1, k - 1));
    for (const auto& r : reset_events) p.transitions[{id, r}] = state_id(0);
  }
  p.initial = state_id(0);
  validate_or_throw(p);
  return p;
}

namespace {

ScenarioProgram three_additions(const std::string& name, const std::string& trigger,
                                const std::string& addition) {
  ScenarioProgram p;
  p.name = name;
  p.initial = "idle";
  p.states = {"idle", "add1", "add2", "add3"};
  {
    SyncDeclaration d;
    d.waited_for = EventSet::of({trigger});
    p.declarations.emplace("idle", std::move(d));
  }
  for (const auto& id : {"add1", "add2", "add3"}) {
    SyncDeclaration d;
    d.requested.emplace_back(addition);
    p.declarations.emplace(id, std::move(d));
  }
  p.transitions[{"idle", trigger}] = "add1";
  p.transitions[{"add1", addition}] = "add2";
  p.transitions[{"add2", addition}] = "add3";
  p.transitions[{"add3", addition}] = "idle";
  validate_or_throw(p);
  return p;
}

}  // namespace

std::vector<ScenarioProgram> water_tap_model() {
  std::vector<ScenarioProgram> model;
  model.push_back(three_additions("AddHotWater", "WaterLow", "AddHot"));
  model.push_back(three_additions("AddColdWater", "WaterLow", "AddCold"));

  ScenarioProgram stability;
  stability.name = "Stability";
  stability.initial = "hotTurn";
  stability.states = {"hotTurn", "coldTurn"};
  {
    SyncDeclaration d;
    d.waited_for = EventSet::of({"AddHot"});
    d.blocked = EventSet::of({"AddCold"});
    stability.declarations.emplace("hotTurn", std::move(d));
  }
  {
    SyncDeclaration d;
    d.waited_for = EventSet::of({"AddCold"});
    d.blocked = EventSet::of({"AddHot"});
    stability.declarations.emplace("coldTurn", std::move(d));
  }
  stability.transitions[{"hotTurn", "AddHot"}] = "coldTurn";
  stability.transitions[{"coldTurn", "AddCold"}] = "hotTurn";
  validate_or_throw(stability);
  model.push_back(std::move(stability));
  return model;
}

ScenarioProgram request_once(const std::string& event) {
  ScenarioProgram p;
  p.name = "once-" + event;
  p.initial = "pending";
  p.states = {"pending", "done"};
  {
    SyncDeclaration d;
    d.requested.emplace_back(event);
    p.declarations.emplace("pending", std::move(d));
  }
  p.declarations.emplace("done", SyncDeclaration{});
  p.transitions[{"pending", event}] = "done";
  validate_or_throw(p);
  return p;
}

}  // namespace sbrl::dsl
