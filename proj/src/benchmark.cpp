#include "tidyloop/benchmark.hpp"

#include "tidyloop/error.hpp"

namespace tidyloop {
namespace {

constexpr int kOptionCount = 5;

}  // namespace

std::string to_string(LabelProvenance provenance) {
  return provenance == LabelProvenance::AnnotatorMajority
             ? "annotator_majority"
             : "synthetic_ground_truth";
}

LabelProvenance provenance_from_string(const std::string& name) {
  if (name == "annotator_majority") return LabelProvenance::AnnotatorMajority;
  if (name == "synthetic_ground_truth")
    return LabelProvenance::SyntheticGroundTruth;
  throw ParseError("unknown label provenance: '" + name + "'");
}

void BenchmarkQuestion::check() const {
  if (object.empty()) throw ParseError("benchmark question without object");
  if (options.size() != kOptionCount)
    throw ParseError("benchmark question for '" + object + "' has " +
                     std::to_string(options.size()) + " options, expected 5");
  if (!omitted) {
    if (correct.empty() || correct.size() > 2)
      throw ParseError("benchmark question for '" + object +
                       "' needs 1 or 2 correct letters, has " +
                       std::to_string(correct.size()));
  }
  for (char letter : correct) {
    if (letter < 'a' || letter >= 'a' + kOptionCount)
      throw ParseError("benchmark question for '" + object +
                       "' has correct letter '" + std::string(1, letter) +
                       "' outside (a)-(e)");
  }
}

nlohmann::ordered_json to_json(const BenchmarkQuestion& question) {
  nlohmann::ordered_json node;
  node["object"] = question.object;
  auto options = nlohmann::ordered_json::array();
  for (const auto& option : question.options) {
    options.push_back({{"state", option.state}, {"action", option.action}});
  }
  node["options"] = std::move(options);
  auto correct = nlohmann::ordered_json::array();
  for (char letter : question.correct) correct.push_back(std::string(1, letter));
  node["correct"] = std::move(correct);
  node["omitted"] = question.omitted;
  node["provenance"] = to_string(question.provenance);
  return node;
}

BenchmarkQuestion benchmark_question_from_json(const nlohmann::json& node) {
  if (!node.is_object()) throw ParseError("benchmark question must be an object");
  BenchmarkQuestion question;
  for (const auto& [key, value] : node.items()) {
    if (key == "object") {
      question.object = value.get<std::string>();
    } else if (key == "options") {
      for (const auto& entry : value) {
        for (const auto& [okey, _] : entry.items()) {
          if (okey != "state" && okey != "action")
            throw ParseError("benchmark option has unknown field '" + okey + "'");
        }
        question.options.push_back(
            {entry.at("state").get<std::string>(), entry.at("action").get<std::string>()});
      }
    } else if (key == "correct") {
      for (const auto& entry : value) {
        const auto letter = entry.get<std::string>();
        if (letter.size() != 1)
          throw ParseError("correct letters must be single characters, got '" +
                           letter + "'");
        question.correct.insert(letter[0]);
      }
    } else if (key == "omitted") {
      question.omitted = value.get<bool>();
    } else if (key == "provenance") {
      question.provenance = provenance_from_string(value.get<std::string>());
    } else {
      throw ParseError("benchmark question has unknown field '" + key + "'");
    }
  }
  question.check();
  return question;
}

}  // namespace tidyloop
