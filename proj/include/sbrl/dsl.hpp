#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbrl/scenario.hpp"

namespace sbrl::dsl {

struct ScenarioSource {
  std::string text;
  std::string origin_name = "<inline>";
};

struct ParseDiagnostic {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  std::string message;
  enum class Severity { Error, Warning } severity = Severity::Error;
};

struct ParseResult {
  std::optional<ScenarioProgram> program;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
  bool has_errors() const {
    for (const auto& d : diagnostics)
      if (d.severity == ParseDiagnostic::Severity::Error) return true;
    return false;
  }
};

/// Parse one scenario from its textual form.
///
///   scenario <name>
///   state <id> [initial]
///     request <ev> [, <ev> ...]
///     wait    <ev> [, <ev> ...] | *
///     block   <ev> [, <ev> ...]
///     on <ev> -> <stateId>
///
/// '#' starts a comment; LF and CRLF both accepted. On success the program
/// satisfies every structural invariant; on failure at least one Error
/// diagnostic carries a position.
ParseResult parse_scenario(const ScenarioSource& src);

/// Canonical textual form; parse_scenario(render_scenario(p)) == p for valid p.
std::string render_scenario(const ScenarioProgram& program);

/// "file:line:col: severity: message" for terminal output.
std::string format_diagnostic(const ScenarioSource& src, const ParseDiagnostic& d);

/// A scenario that waits for `event` and the reset events, counts consecutive
/// occurrences of `event`, and blocks it once k-1 have been seen in a row.
/// Any reset event sends the counter back to zero; further occurrences of
/// `event` keep it saturated, so blocking holds until a reset arrives.
/// Requires k >= 2 and event not among reset_events.
ScenarioProgram avoid_k_in_a_row(const std::string& event, int k,
                                 const std::vector<std::string>& reset_events);

/// The water-tap trio: AddHotWater and AddColdWater each wait for WaterLow
/// and then request three additions; Stability interleaves them by
/// alternately blocking AddCold and AddHot.
std::vector<ScenarioProgram> water_tap_model();

/// A driver that requests `event` once and terminates.
ScenarioProgram request_once(const std::string& event);

}  // namespace sbrl::dsl
