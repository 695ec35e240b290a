#include "tidyloop/parsing.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "tidyloop/error.hpp"

namespace tidyloop {
namespace {

std::string trim(const std::string& text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])))
    --end;
  return text.substr(begin, end - begin);
}

std::string to_lower(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// "`name`:" (optionally prefixed with - or *) starts a per-object block.
// Returns the name and whatever follows the colon.
struct HeaderMatch {
  std::string name;
  std::string rest;
};

std::optional<HeaderMatch> match_header(const std::string& raw_line) {
  std::string line = trim(raw_line);
  if (!line.empty() && (line[0] == '-' || line[0] == '*'))
    line = trim(line.substr(1));
  if (line.size() < 3 || line[0] != '`') return std::nullopt;
  const size_t close = line.find('`', 1);
  if (close == std::string::npos) return std::nullopt;
  const std::string name = line.substr(1, close - 1);
  if (name.empty()) return std::nullopt;
  size_t pos = close + 1;
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (pos >= line.size() || line[pos] != ':') return std::nullopt;
  return HeaderMatch{name, trim(line.substr(pos + 1))};
}

bool starts_with(const std::string& text, const char* prefix) {
  return text.rfind(prefix, 0) == 0;
}

// Splits "(a) Yes (b) No (c) Cannot answer from image" (possibly spread over
// several lines) into the per-letter texts.
std::map<char, std::string> split_lettered(const std::string& text) {
  std::map<char, std::string> parts;
  char current = 0;
  std::string buffer;
  auto flush = [&] {
    if (current != 0) {
      if (parts.count(current) > 0)
        throw ParseError(std::string("option (") + current + ") appears twice");
      parts[current] = trim(buffer);
    }
    buffer.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(' && i + 2 < text.size() && text[i + 2] == ')' &&
        std::isalpha(static_cast<unsigned char>(text[i + 1]))) {
      flush();
      current = static_cast<char>(
          std::tolower(static_cast<unsigned char>(text[i + 1])));
      i += 2;
      continue;
    }
    if (current != 0) buffer += text[i];
  }
  flush();
  return parts;
}

void check_option_triple(const std::string& options_text,
                         const std::string& object) {
  const auto parts = split_lettered(options_text);
  if (parts.size() != kQuestionOptions.size())
    throw ParseError("question for '" + object + "' lists " +
                     std::to_string(parts.size()) + " options, expected 3");
  char letter = 'a';
  for (const char* expected : kQuestionOptions) {
    auto it = parts.find(letter);
    if (it == parts.end() || it->second != expected)
      throw ParseError("question for '" + object + "' has malformed option (" +
                       std::string(1, letter) + "); expected '" +
                       std::string(expected) + "'");
    ++letter;
  }
}

constexpr const char* kReasoningMarker = "Socially motivated reasoning";
constexpr const char* kQuestionMarker = "Resulting question";

// Parses the lines belonging to one object's block.
FollowUpQuestion parse_block(const std::string& object,
                             const std::string& header_rest,
                             const std::vector<std::string>& lines) {
  FollowUpQuestion question;
  question.object = object;

  std::string options_text;
  if (!header_rest.empty()) {
    // Baseline layout: the question rides on the header line.
    std::string rest = header_rest;
    const size_t options_at = rest.find("(a)");
    if (options_at != std::string::npos) {
      options_text = rest.substr(options_at);
      rest = trim(rest.substr(0, options_at));
    }
    question.question = rest;
  }

  enum class Section { None, Reasoning, Question, Options };
  Section section = question.question.empty() ? Section::None : Section::Options;
  for (const auto& raw : lines) {
    const std::string line = trim(raw);
    if (line.empty()) {
      if (section == Section::Reasoning || section == Section::Question)
        section = Section::None;
      continue;
    }
    if (starts_with(line, kReasoningMarker)) {
      const size_t colon = line.find(':');
      question.reasoning =
          colon == std::string::npos ? "" : trim(line.substr(colon + 1));
      section = Section::Reasoning;
      continue;
    }
    if (starts_with(line, kQuestionMarker)) {
      const size_t colon = line.find(':', std::string(kQuestionMarker).size());
      std::string rest =
          colon == std::string::npos ? "" : trim(line.substr(colon + 1));
      const size_t options_at = rest.find("(a)");
      if (options_at != std::string::npos) {
        options_text = rest.substr(options_at);
        rest = trim(rest.substr(0, options_at));
        section = Section::Options;
      } else {
        section = Section::Question;
      }
      question.question = rest;
      continue;
    }
    if (starts_with(line, "(")) {
      options_text += options_text.empty() ? line : " " + line;
      section = Section::Options;
      continue;
    }
    // Continuation of whatever section we are in.
    switch (section) {
      case Section::Reasoning:
        question.reasoning += question.reasoning.empty() ? line : " " + line;
        break;
      case Section::Question:
        question.question += question.question.empty() ? line : " " + line;
        break;
      case Section::Options:
        options_text += " " + line;
        break;
      case Section::None:
        break;  // stray prose between sections is ignored
    }
  }

  if (question.question.empty())
    throw ParseError("no question found for object '" + object + "'");
  if (!options_text.empty()) check_option_triple(options_text, object);
  return question;
}

}  // namespace

std::string to_string(const ChoiceSelection& selection) {
  return "(" + std::string(1, selection.letter) + ")";
}

QuestionSet parse_question_block(const std::string& text,
                                 const std::vector<std::string>& objects) {
  if (objects.empty())
    throw ParseError("question block needs a non-empty object list");

  const auto lines = split_lines(text);

  struct Block {
    std::string header_rest;
    std::vector<std::string> body;
  };
  std::map<std::string, Block> blocks;  // keyed by canonical object name

  std::string open_block;  // canonical name of the block being collected
  for (const auto& line : lines) {
    if (auto header = match_header(line)) {
      const std::string lowered = to_lower(header->name);
      auto matches = std::find_if(
          objects.begin(), objects.end(),
          [&](const std::string& name) { return to_lower(name) == lowered; });
      if (matches != objects.end()) {
        if (blocks.count(*matches) > 0)
          throw ParseError("object '" + *matches +
                           "' appears twice in the question block");
        blocks[*matches] = Block{header->rest, {}};
        open_block = *matches;
        continue;
      }
      open_block.clear();  // block for an unknown object: skip its lines
      continue;
    }
    if (!open_block.empty()) blocks[open_block].body.push_back(line);
  }

  std::vector<std::string> missing;
  for (const auto& name : objects) {
    if (blocks.count(name) == 0) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string joined;
    for (const auto& name : missing) {
      if (!joined.empty()) joined += ", ";
      joined += "'" + name + "'";
    }
    throw ParseError("question block is missing objects: " + joined);
  }

  QuestionSet set;
  for (const auto& name : objects) {
    const auto& blk = blocks.at(name);
    set.questions.push_back(parse_block(name, blk.header_rest, blk.body));
  }
  return set;
}

std::string format_question_block(const QuestionSet& set) {
  std::string out;
  for (const auto& question : set.questions) {
    if (!out.empty()) out += "\n";
    out += "-`" + question.object + "`:\n";
    if (!question.reasoning.empty())
      out += "Socially motivated reasoning: " + question.reasoning + "\n\n";
    out += "Resulting question (that can be answered by taking a picture of "
           "object): " +
           question.question + "\n\n";
    out += "(a) Yes (b) No (c) Cannot answer from image\n";
  }
  return out;
}

Angle parse_angle_choice(const std::string& text) {
  static const std::map<char, Angle> kLetterToAngle = {{'a', Angle::Top},
                                                       {'b', Angle::Right},
                                                       {'c', Angle::Left},
                                                       {'d', Angle::Front},
                                                       {'e', Angle::Back}};
  std::optional<char> last;
  for (size_t i = 0; i + 2 < text.size(); ++i) {
    if (text[i] == '(' && text[i + 2] == ')') {
      const char letter = static_cast<char>(
          std::tolower(static_cast<unsigned char>(text[i + 1])));
      if (letter >= 'a' && letter <= 'e') last = letter;
    }
  }
  if (!last) {
    // A line holding nothing but the letter also counts.
    for (const auto& raw : split_lines(text)) {
      const std::string line = trim(raw);
      if (line.size() >= 1 && line.size() <= 2) {
        const char letter = static_cast<char>(
            std::tolower(static_cast<unsigned char>(line[0])));
        if (letter >= 'a' && letter <= 'e' &&
            (line.size() == 1 || line[1] == ')' || line[1] == '.' ||
             line[1] == ':')) {
          last = letter;
        }
      }
    }
  }
  if (!last) throw ParseError("no angle option letter found in response");
  return kLetterToAngle.at(*last);
}

ChoiceSelection parse_choice(const std::string& text, int n_options) {
  if (n_options < 1 || n_options > 26)
    throw Error("n_options out of range: " + std::to_string(n_options));

  auto make_selection = [&](char letter, size_t at) {
    if (letter - 'a' >= n_options)
      throw ParseError(std::string("option letter '") + letter +
                       "' is out of range for " + std::to_string(n_options) +
                       " options");
    ChoiceSelection selection;
    selection.letter = letter;
    const std::string before = trim(text.substr(0, at));
    if (!before.empty()) selection.rationale = before;
    return selection;
  };

  for (size_t i = 0; i + 2 < text.size(); ++i) {
    if (text[i] == '(' && text[i + 2] == ')' &&
        std::isalpha(static_cast<unsigned char>(text[i + 1]))) {
      const char letter = static_cast<char>(
          std::tolower(static_cast<unsigned char>(text[i + 1])));
      return make_selection(letter, i);
    }
  }

  // Fallbacks: a line holding just the letter, or "... is: x" at the end.
  size_t offset = 0;
  for (const auto& raw : split_lines(text)) {
    const std::string line = trim(raw);
    if (!line.empty() && line.size() <= 2 &&
        std::isalpha(static_cast<unsigned char>(line[0])) &&
        (line.size() == 1 || line[1] == ')' || line[1] == '.' ||
         line[1] == ':')) {
      const char letter = static_cast<char>(
          std::tolower(static_cast<unsigned char>(line[0])));
      return make_selection(letter, text.find(raw, offset));
    }
    offset += raw.size();
  }
  const size_t colon = text.rfind(':');
  if (colon != std::string::npos) {
    const std::string tail = trim(text.substr(colon + 1));
    if (tail.size() == 1 && std::isalpha(static_cast<unsigned char>(tail[0]))) {
      const char letter = static_cast<char>(
          std::tolower(static_cast<unsigned char>(tail[0])));
      return make_selection(letter, colon);
    }
  }
  throw ParseError("no option letter found in response");
}

namespace {

// Pulls the (a)-(e) option texts for `object` out of a stage completion.
// When the completion has no object headers at all, the whole text is
// treated as that object's section.
std::map<char, std::string> lettered_section(const std::string& text,
                                             const std::string& object,
                                             const char* stage) {
  const auto lines = split_lines(text);
  bool any_header = false;
  bool matched = false;
  std::vector<std::string> section;
  bool in_section = false;
  const std::string lowered = to_lower(object);
  for (const auto& line : lines) {
    if (auto header = match_header(line)) {
      any_header = true;
      in_section = to_lower(header->name) == lowered;
      matched = matched || in_section;
      continue;
    }
    if (in_section) section.push_back(line);
  }
  if (!any_header) section = lines;
  if (any_header && !matched)
    throw ParseError(std::string(stage) + " completion has no section for '" +
                     object + "'");

  std::map<char, std::string> parts;
  char current = 0;
  std::string buffer;
  auto flush = [&] {
    if (current != 0) {
      if (parts.count(current) > 0)
        throw ParseError(std::string(stage) + " option (" + current +
                         ") for '" + object + "' appears twice");
      parts[current] = trim(buffer);
    }
    buffer.clear();
  };
  for (const auto& raw : section) {
    const std::string line = trim(raw);
    if (line.size() >= 3 && line[0] == '(' && line[2] == ')' &&
        std::isalpha(static_cast<unsigned char>(line[1]))) {
      flush();
      current =
          static_cast<char>(std::tolower(static_cast<unsigned char>(line[1])));
      buffer = trim(line.substr(3));
      continue;
    }
    if (current != 0 && !line.empty()) buffer += " " + line;
  }
  flush();
  return parts;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

}  // namespace

std::vector<StateActionPair> parse_benchmark_options(const std::string& stage1,
                                                     const std::string& stage2,
                                                     const std::string& object) {
  const auto states = lettered_section(stage1, object, "stage-1");
  const auto actions = lettered_section(stage2, object, "stage-2");
  for (const auto& [name, parts] :
       {std::pair{"stage-1", &states}, std::pair{"stage-2", &actions}}) {
    if (parts->size() != 5)
      throw ParseError(std::string(name) + " completion for '" + object +
                       "' has " + std::to_string(parts->size()) +
                       " options, expected 5");
  }

  std::vector<StateActionPair> pairs;
  int leave_count = 0;
  for (char letter = 'a'; letter <= 'e'; ++letter) {
    auto state = states.find(letter);
    auto action = actions.find(letter);
    if (state == states.end())
      throw ParseError(std::string("stage-1 completion for '") + object +
                       "' is missing option (" + letter + ")");
    if (action == actions.end())
      throw ParseError(std::string("stage-2 completion for '") + object +
                       "' is missing option (" + letter + ")");
    if (contains_ci(action->second, "leave") &&
        contains_ci(action->second, "as is"))
      ++leave_count;
    pairs.push_back({state->second, action->second});
  }
  if (leave_count != 1)
    throw ParseError("actions for '" + object + "' contain " +
                     std::to_string(leave_count) +
                     " leave-as-is options, expected exactly 1");
  return pairs;
}

std::string extract_program(const std::string& text) {
  const size_t marker = text.rfind("Program:");
  const size_t start = marker == std::string::npos ? 0 : marker;

  const auto lines = split_lines(text.substr(start));
  std::vector<std::string> body;
  bool in_fence = false;
  bool found_fence = false;
  for (const auto& raw : lines) {
    const std::string line = trim(raw);
    if (starts_with(line, "```")) {
      if (in_fence) break;  // closing fence; trailing prose is ignored
      in_fence = true;
      found_fence = true;
      continue;
    }
    if (in_fence) body.push_back(raw);
  }
  if (!found_fence) throw ParseError("no fenced code block in completion");

  std::string out;
  for (const auto& line : body) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace tidyloop
