#pragma once

#include <string>
#include <vector>

#include "tidyloop/pipeline.hpp"

namespace tidyloop {

// Fraction of non-omitted questions whose decision letter is in the
// question's correct set. Two-way ties count either letter as correct;
// omitted questions leave both numerator and denominator. Throws when no
// question is scoreable or a scoreable question has no decision.
double score(const std::vector<ObjectDecision>& decisions,
             const std::vector<BenchmarkQuestion>& questions);

// Fractions of follow-up questions answerable from each angle class. The
// non-chosen and non-front classes average over their angle sets per
// question before aggregating. Questions whose text matches no canonical
// attribute phrase are skipped.
struct AnswerabilityReport {
  double scene = 0.0;
  double non_front = 0.0;
  double front = 0.0;
  double non_llm = 0.0;
  double llm_angle = 0.0;
  int n_questions = 0;
};

AnswerabilityReport answerability(const WorldSpec& world,
                                  const std::vector<QuestionRecord>& records);

struct EvalReport {
  Mode mode = Mode::OursLlm;
  int iterations = 0;
  // accuracy after each iteration 1..N; a single entry for open-loop runs
  // (iterations == 0), scored on the initial description alone
  std::vector<double> per_iteration_accuracy;
  AnswerabilityReport answerability;
  int n_questions = 0;
};

// Runs the pipeline once, scoring the benchmark after every iteration on the
// context gathered so far.
EvalReport evaluate_mode(const WorldSpec& world, const PipelineConfig& config,
                         const LlmBackend& llm, const VlmBackend& vlm,
                         const PromptRegistry& registry, Transcript& transcript);

// Two-stage option generation: elicit five states per object, then a tidying
// action per state. Correct letters come from each object's declared
// ground-truth options.
std::vector<BenchmarkQuestion> generate_benchmark(const WorldSpec& world,
                                                  const LlmBackend& llm,
                                                  const PromptRegistry& registry,
                                                  Transcript& transcript);

nlohmann::ordered_json to_json(const EvalReport& report);

// Plain-text table: scene / non-front / front / non-LLM / LLM columns.
std::string format_report_table(const EvalReport& report);
std::string format_summary_table(const std::vector<EvalReport>& reports);

}  // namespace tidyloop
