#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tidyloop/world.hpp"

namespace tidyloop {
namespace dsl {

enum class Func { LeaveAlone, SetDesignated, Relocate, Cleanup, Done };

std::string to_string(Func func);

// done() takes no argument; every other call takes exactly one string.
struct Statement {
  Func func = Func::Done;
  std::optional<std::string> arg;

  bool operator==(const Statement& other) const = default;
};

struct RobotProgram {
  std::vector<Statement> statements;
  std::string source;

  bool same_statements(const RobotProgram& other) const {
    return statements == other.statements;
  }
};

struct Violation {
  int statement = 0;  // index into statements
  std::string rule;   // R1..R5
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;  // R5 drift from the declared mapping
};

struct TraceEvent {
  int statement = 0;
  Func func = Func::Done;
  std::optional<std::string> arg;
  std::optional<std::string> pre_location;
  std::optional<std::string> post_location;
};

struct ExecutionTrace {
  std::vector<TraceEvent> events;
};

// Grammar: program := stmt+ ; stmt := "robot" "." ident "(" [string] ")" ";"?
// String literals are double-quoted with no escapes; whitespace and newlines
// are insignificant between tokens. Throws ParseError with line:column
// positions for lexical errors, unknown function names, and arity
// mismatches. An all-whitespace source is an error.
RobotProgram parse_program(const std::string& src);

// Canonical one-statement-per-line form; parse(print(p)) == p structurally.
std::string print_program(const RobotProgram& program);

// World-independent checks only: call ordering (R1) and termination (R4).
ValidationReport validate(const RobotProgram& program);

// All rules, in order:
//   R1 relocate/cleanup need an earlier set_designated with no done between
//   R2 object arguments must be declared objects
//   R3 set_designated arguments must be declared receptacles
//   R4 the final statement is done, and done appears exactly once
//   R5 (warning) the receptacle designated at each relocate/cleanup matches
//      the object's declared mapping for that verb
ValidationReport validate(const RobotProgram& program,
                          const std::set<std::string>& objects,
                          const std::set<std::string>& receptacles,
                          const std::map<std::string, ReceptacleMap>& mapping);

// Runs a validated program against the world. Statements past done are never
// executed. Precondition breaches (e.g. relocate with no designation)
// surface as errors from the skill layer.
ExecutionTrace run_program(const RobotProgram& program, WorldState& state);

nlohmann::ordered_json to_json(const TraceEvent& event);
nlohmann::ordered_json to_json(const ValidationReport& report);

}  // namespace dsl
}  // namespace tidyloop
