#pragma once

#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace tidyloop {

// Where a question's correct label came from.
enum class LabelProvenance { AnnotatorMajority, SyntheticGroundTruth };

std::string to_string(LabelProvenance provenance);
LabelProvenance provenance_from_string(const std::string& name);

struct BenchmarkOption {
  std::string state;
  std::string action;
};

// One five-way multiple-choice item: hypothetical object states paired with
// tidying actions. `correct` holds one letter, or two for a tied vote.
// Omitted questions stay in the manifest but never reach the scorer.
struct BenchmarkQuestion {
  std::string object;
  std::vector<BenchmarkOption> options;  // exactly 5
  std::set<char> correct;                // letters 'a'..'e'
  bool omitted = false;
  LabelProvenance provenance = LabelProvenance::SyntheticGroundTruth;

  // Throws ParseError/ReferenceError when the shape or letters are off.
  void check() const;
};

nlohmann::ordered_json to_json(const BenchmarkQuestion& question);
BenchmarkQuestion benchmark_question_from_json(const nlohmann::json& node);

}  // namespace tidyloop
