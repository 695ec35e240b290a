#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tidyloop/angle.hpp"

namespace tidyloop {

// The fixed answer options every framework follow-up question carries.
inline constexpr std::array<const char*, 3> kQuestionOptions = {
    "Yes", "No", "Cannot answer from image"};

struct FollowUpQuestion {
  std::string object;
  std::string reasoning;  // empty for baseline-format questions
  std::string question;

  bool operator==(const FollowUpQuestion& other) const = default;
};

struct QuestionSet {
  std::vector<FollowUpQuestion> questions;

  bool operator==(const QuestionSet& other) const = default;
};

struct ChoiceSelection {
  char letter = 'a';
  std::optional<std::string> rationale;
};

std::string to_string(const ChoiceSelection& selection);

// Parses an LLM question-generation completion into exactly one question per
// listed object. Accepts the reasoned block layout (reasoning line, question
// line, option triple on one or several lines) and the terse baseline layout
// ("`name`: question"). Object names match case-insensitively. Throws
// ParseError when an object is missing, duplicated, or its options stray
// from the fixed triple.
QuestionSet parse_question_block(const std::string& text,
                                 const std::vector<std::string>& objects);

// Renders a QuestionSet back into the reasoned block layout; parsing the
// result reproduces the set.
std::string format_question_block(const QuestionSet& set);

// Maps the angle-selection letters (a) Top, (b) Right, (c) Left, (d) Front,
// (e) Behind onto angles. Rationale text may precede the choice; when the
// model restates options, the last lettered option wins.
Angle parse_angle_choice(const std::string& text);

// Extracts the first option letter within (a)..(letter n), case-insensitive,
// parenthesized or bare. Prose before the letter becomes the rationale.
ChoiceSelection parse_choice(const std::string& text, int n_options);

struct StateActionPair {
  std::string state;
  std::string action;
};

// Aligns the five (a)-(e) states from the stage-1 completion with the five
// actions from stage 2 for one object. Exactly one action must offer to
// leave the object as is.
std::vector<StateActionPair> parse_benchmark_options(const std::string& stage1,
                                                     const std::string& stage2,
                                                     const std::string& object);

// Returns the body of the fenced code block after the last "Program:"
// marker (or the first fenced block when no marker is present). Prose after
// the closing fence is ignored.
std::string extract_program(const std::string& text);

}  // namespace tidyloop
