#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tidyloop/clients.hpp"
#include "tidyloop/context.hpp"
#include "tidyloop/dsl.hpp"
#include "tidyloop/parsing.hpp"
#include "tidyloop/prompts.hpp"
#include "tidyloop/world.hpp"

namespace tidyloop {

enum class Mode {
  OursLlm,
  OursFront,
  BaselineQuestions,
  NoActivePerception,
  NoQuestions,
};

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);
std::vector<Mode> all_modes();

struct PipelineConfig {
  Mode mode = Mode::OursLlm;
  int iterations = 5;
  std::map<std::string, std::string> preference_map;

  // no_questions runs open-loop: iterations clamp to 0.
  PipelineConfig normalized() const;
};

struct ObjectDecision {
  std::string object;
  ChoiceSelection chosen_option;
  std::string action_text;
  std::vector<int> transcript;  // event sequence numbers
};

// One follow-up question together with the angle that was used to answer it;
// the raw material for answerability statistics.
struct QuestionRecord {
  std::string object;
  std::string question;
  Angle chosen_angle = Angle::Scene;
};

struct TranscriptEvent {
  int seq = 0;
  std::string ts;
  std::string kind;  // prompt | completion | vqa | decision | skill
  nlohmann::ordered_json payload;
};

// Append-only event log. With a pinned timestamp the serialized form is
// byte-reproducible across runs.
class Transcript {
 public:
  explicit Transcript(std::string pinned_timestamp = "");

  int add(const std::string& kind, nlohmann::ordered_json payload);
  const std::vector<TranscriptEvent>& events() const { return events_; }
  std::string to_jsonl() const;

 private:
  std::string pinned_;
  std::vector<TranscriptEvent> events_;
};

// "These are the objects on the desk: `a`, `b`." built from ground-truth
// names; single line, no trailing newline.
std::string initial_description(const std::vector<std::string>& objects);

struct ProgramOutcome {
  std::string object;
  std::string source;
  dsl::ValidationReport report;
  bool executed = false;
  std::string error;  // set when the completion had no parseable program
};

struct PipelineResult {
  Context context;
  std::vector<ObjectDecision> decisions;
  std::vector<ProgramOutcome> programs;
  WorldState final_state;
  std::vector<QuestionRecord> question_records;
};

// Drives one surface through the loop. Holds the question/answer cache that
// spares re-imaging exact duplicates, so keep one instance per run.
class Pipeline {
 public:
  Pipeline(const WorldSpec& world, const PipelineConfig& config,
           const LlmBackend& llm, const VlmBackend& vlm,
           const PromptRegistry& registry, Transcript& transcript);

  Context initial_context() const;

  // Appends exactly one entry per object; prior entries are never touched.
  void run_iteration(Context& context, int iteration);

  // Renders the action prompt from the context gathered so far, completes
  // it, and parses the chosen letter. `key_iteration` is the number of
  // iterations the context has seen (it keys scripted fixtures).
  ObjectDecision decide(const Context& context, const BenchmarkQuestion& question,
                        int key_iteration);

  // Generates, validates and executes one program per decision. Invalid
  // programs are reported and skipped; the world stays untouched for them.
  std::vector<ProgramOutcome> plan_and_execute(
      WorldState& state, const std::vector<ObjectDecision>& decisions);

  const std::vector<QuestionRecord>& question_records() const {
    return question_records_;
  }

 private:
  std::string complete_logged(const std::string& role, const std::string& object,
                              int iteration, const std::string& prompt,
                              std::vector<int>* seqs = nullptr);
  ChoiceSelection complete_choice(const std::string& role,
                                  const std::string& object, int iteration,
                                  const std::string& prompt, int n_options,
                                  std::vector<int>* seqs);
  Angle choose_angle(const std::string& object, const std::string& question,
                     int iteration);

  const WorldSpec* world_;
  PipelineConfig config_;
  const LlmBackend* llm_;
  const VlmBackend* vlm_;
  const PromptRegistry* registry_;
  Transcript* transcript_;
  std::map<std::pair<std::string, std::string>, VqaAnswer> answer_cache_;
  std::vector<QuestionRecord> question_records_;
};

// Full run: description, iterations, one decision per benchmark question,
// then code generation and execution.
PipelineResult run_pipeline(const WorldSpec& world, const PipelineConfig& config,
                            const LlmBackend& llm, const VlmBackend& vlm,
                            const PromptRegistry& registry,
                            Transcript& transcript);

nlohmann::ordered_json to_json(const ObjectDecision& decision);
nlohmann::ordered_json to_json(const ProgramOutcome& outcome);

}  // namespace tidyloop
