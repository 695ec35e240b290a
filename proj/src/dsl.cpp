#include "tidyloop/dsl.hpp"

#include <cctype>

#include "tidyloop/error.hpp"

namespace tidyloop {
namespace dsl {
namespace {

struct Token {
  enum class Kind { Ident, Dot, LParen, RParen, Semi, String, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_whitespace();
    Token token;
    token.line = line_;
    token.column = column_;
    if (pos_ >= src_.size()) {
      token.kind = Token::Kind::End;
      return token;
    }
    const char c = src_[pos_];
    if (c == '.') return single(Token::Kind::Dot, token);
    if (c == '(') return single(Token::Kind::LParen, token);
    if (c == ')') return single(Token::Kind::RParen, token);
    if (c == ';') return single(Token::Kind::Semi, token);
    if (c == '"') return string_literal(token);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return ident(token);
    throw ParseError(at(token) + "unexpected character '" + std::string(1, c) +
                     "'");
  }

 private:
  std::string at(const Token& token) const {
    return std::to_string(token.line) + ":" + std::to_string(token.column) +
           ": ";
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_whitespace() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      advance();
    }
  }

  Token single(Token::Kind kind, Token token) {
    token.kind = kind;
    token.text = src_[pos_];
    advance();
    return token;
  }

  Token string_literal(Token token) {
    advance();  // opening quote
    std::string value;
    while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
      value += src_[pos_];
      advance();
    }
    if (pos_ >= src_.size() || src_[pos_] != '"')
      throw ParseError(at(token) + "unterminated string literal");
    advance();  // closing quote
    token.kind = Token::Kind::String;
    token.text = std::move(value);
    return token;
  }

  Token ident(Token token) {
    std::string value;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      value += src_[pos_];
      advance();
    }
    token.kind = Token::Kind::Ident;
    token.text = std::move(value);
    return token;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

std::string position(const Token& token) {
  return std::to_string(token.line) + ":" + std::to_string(token.column) + ": ";
}

std::optional<Func> func_from_name(const std::string& name) {
  if (name == "leave_alone") return Func::LeaveAlone;
  if (name == "set_designated") return Func::SetDesignated;
  if (name == "relocate") return Func::Relocate;
  if (name == "cleanup") return Func::Cleanup;
  if (name == "done") return Func::Done;
  return std::nullopt;
}

}  // namespace

std::string to_string(Func func) {
  switch (func) {
    case Func::LeaveAlone:
      return "leave_alone";
    case Func::SetDesignated:
      return "set_designated";
    case Func::Relocate:
      return "relocate";
    case Func::Cleanup:
      return "cleanup";
    case Func::Done:
      return "done";
  }
  throw Error("invalid Func value");
}

RobotProgram parse_program(const std::string& src) {
  Lexer lexer(src);
  RobotProgram program;
  program.source = src;

  Token token = lexer.next();
  while (token.kind != Token::Kind::End) {
    if (token.kind != Token::Kind::Ident || token.text != "robot")
      throw ParseError(position(token) + "expected 'robot', got '" +
                       token.text + "'");
    token = lexer.next();
    if (token.kind != Token::Kind::Dot)
      throw ParseError(position(token) + "expected '.' after 'robot'");
    token = lexer.next();
    if (token.kind != Token::Kind::Ident)
      throw ParseError(position(token) + "expected a function name");
    const auto func = func_from_name(token.text);
    if (!func)
      throw ParseError(position(token) + "unknown function '" + token.text +
                       "'");
    const Token name_token = token;
    token = lexer.next();
    if (token.kind != Token::Kind::LParen)
      throw ParseError(position(token) + "expected '(' after function name");
    token = lexer.next();

    Statement statement;
    statement.func = *func;
    if (token.kind == Token::Kind::String) {
      statement.arg = token.text;
      token = lexer.next();
    }
    if (token.kind != Token::Kind::RParen)
      throw ParseError(position(token) + "expected ')'");

    if (*func == Func::Done && statement.arg.has_value())
      throw ParseError(position(name_token) + "done() takes no argument");
    if (*func != Func::Done && !statement.arg.has_value())
      throw ParseError(position(name_token) + to_string(*func) +
                       "() takes exactly one string argument");

    program.statements.push_back(std::move(statement));
    token = lexer.next();
    if (token.kind == Token::Kind::Semi) token = lexer.next();
  }

  if (program.statements.empty()) throw ParseError("empty program");
  return program;
}

std::string print_program(const RobotProgram& program) {
  std::string out;
  for (const auto& statement : program.statements) {
    out += "robot." + to_string(statement.func) + "(";
    if (statement.arg.has_value()) out += "\"" + *statement.arg + "\"";
    out += ");\n";
  }
  return out;
}

namespace {

ValidationReport validate_impl(const RobotProgram& program,
                               const std::set<std::string>* objects,
                               const std::set<std::string>* receptacles,
                               const std::map<std::string, ReceptacleMap>* mapping) {
  ValidationReport report;
  auto violate = [&report](int index, const char* rule, std::string message) {
    report.violations.push_back({index, rule, std::move(message)});
  };

  // done resets the designation register, so "no intervening done" falls out
  // of tracking the register forward.
  std::optional<std::string> designated;
  int done_count = 0;

  for (size_t i = 0; i < program.statements.size(); ++i) {
    const auto& statement = program.statements[i];
    const int index = static_cast<int>(i);
    switch (statement.func) {
      case Func::SetDesignated:
        designated = statement.arg;
        if (receptacles != nullptr && receptacles->count(*statement.arg) == 0)
          violate(index, "R3",
                  "set_designated(\"" + *statement.arg +
                      "\") names an undeclared receptacle");
        break;
      case Func::LeaveAlone:
        if (objects != nullptr && objects->count(*statement.arg) == 0)
          violate(index, "R2",
                  "leave_alone(\"" + *statement.arg +
                      "\") names an undeclared object");
        break;
      case Func::Relocate:
      case Func::Cleanup: {
        const std::string verb = to_string(statement.func);
        if (!designated.has_value())
          violate(index, "R1",
                  verb + "(\"" + *statement.arg +
                      "\") has no preceding set_designated");
        if (objects != nullptr && objects->count(*statement.arg) == 0)
          violate(index, "R2",
                  verb + "(\"" + *statement.arg +
                      "\") names an undeclared object");
        if (mapping != nullptr && designated.has_value()) {
          auto it = mapping->find(*statement.arg);
          if (it != mapping->end()) {
            const std::string& declared = statement.func == Func::Relocate
                                              ? it->second.relocate
                                              : it->second.cleanup;
            if (!declared.empty() && declared != *designated) {
              report.warnings.push_back(
                  {index, "R5",
                   verb + "(\"" + *statement.arg + "\") goes to \"" +
                       *designated + "\" but the declared " + verb +
                       " receptacle is \"" + declared + "\""});
            }
          }
        }
        break;
      }
      case Func::Done:
        designated.reset();
        ++done_count;
        break;
    }
  }

  const int last = static_cast<int>(program.statements.size()) - 1;
  if (program.statements.empty() ||
      program.statements.back().func != Func::Done) {
    violate(last, "R4", "the final statement must be done()");
  }
  if (done_count > 1) violate(last, "R4", "done() appears more than once");

  report.ok = report.violations.empty();
  return report;
}

}  // namespace

ValidationReport validate(const RobotProgram& program) {
  return validate_impl(program, nullptr, nullptr, nullptr);
}

ValidationReport validate(const RobotProgram& program,
                          const std::set<std::string>& objects,
                          const std::set<std::string>& receptacles,
                          const std::map<std::string, ReceptacleMap>& mapping) {
  return validate_impl(program, &objects, &receptacles, &mapping);
}

ExecutionTrace run_program(const RobotProgram& program, WorldState& state) {
  ExecutionTrace trace;
  std::optional<std::string> designated;

  auto location_of = [&state](const std::string& name) {
    const ObjectState* object = state.find(name);
    return object == nullptr ? std::optional<std::string>{}
                             : std::optional<std::string>{
                                   object->location.to_string()};
  };

  for (size_t i = 0; i < program.statements.size(); ++i) {
    const auto& statement = program.statements[i];
    TraceEvent event;
    event.statement = static_cast<int>(i);
    event.func = statement.func;
    event.arg = statement.arg;

    switch (statement.func) {
      case Func::SetDesignated:
        designated = statement.arg;
        break;
      case Func::LeaveAlone:
        event.pre_location = location_of(*statement.arg);
        execute_skill(state, LeaveAloneSkill{*statement.arg});
        event.post_location = location_of(*statement.arg);
        break;
      case Func::Relocate:
        event.pre_location = location_of(*statement.arg);
        execute_skill(state,
                      RelocateSkill{*statement.arg, designated.value_or("")});
        event.post_location = location_of(*statement.arg);
        break;
      case Func::Cleanup:
        event.pre_location = location_of(*statement.arg);
        execute_skill(state,
                      CleanupSkill{*statement.arg, designated.value_or("")});
        event.post_location = location_of(*statement.arg);
        break;
      case Func::Done:
        trace.events.push_back(std::move(event));
        return trace;
    }
    trace.events.push_back(std::move(event));
  }
  return trace;
}

nlohmann::ordered_json to_json(const TraceEvent& event) {
  nlohmann::ordered_json node;
  node["stmt_index"] = event.statement;
  node["func"] = to_string(event.func);
  node["arg"] = event.arg.has_value() ? nlohmann::ordered_json(*event.arg)
                                      : nlohmann::ordered_json(nullptr);
  node["pre_location"] = event.pre_location.has_value()
                             ? nlohmann::ordered_json(*event.pre_location)
                             : nlohmann::ordered_json(nullptr);
  node["post_location"] = event.post_location.has_value()
                              ? nlohmann::ordered_json(*event.post_location)
                              : nlohmann::ordered_json(nullptr);
  return node;
}

nlohmann::ordered_json to_json(const ValidationReport& report) {
  nlohmann::ordered_json node;
  node["ok"] = report.ok;
  auto dump = [](const std::vector<Violation>& items) {
    auto array = nlohmann::ordered_json::array();
    for (const auto& item : items) {
      array.push_back({{"statement", item.statement},
                       {"rule", item.rule},
                       {"message", item.message}});
    }
    return array;
  };
  node["violations"] = dump(report.violations);
  node["warnings"] = dump(report.warnings);
  return node;
}

}  // namespace dsl
}  // namespace tidyloop
