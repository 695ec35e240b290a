#include "tidyloop/pipeline.hpp"

#include <cctype>
#include <ctime>
#include <set>

#include "tidyloop/error.hpp"

namespace tidyloop {
namespace {

std::string now_rfc3339() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

constexpr const char* kNudge = "\n\nAnswer with a single option letter.";

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::OursLlm:
      return "ours_llm";
    case Mode::OursFront:
      return "ours_front";
    case Mode::BaselineQuestions:
      return "baseline_questions";
    case Mode::NoActivePerception:
      return "no_active_perception";
    case Mode::NoQuestions:
      return "no_questions";
  }
  throw Error("invalid Mode value");
}

Mode mode_from_string(const std::string& name) {
  for (Mode mode : all_modes()) {
    if (to_string(mode) == name) return mode;
  }
  throw ConfigError("unknown mode '" + name + "'");
}

std::vector<Mode> all_modes() {
  return {Mode::OursLlm, Mode::OursFront, Mode::BaselineQuestions,
          Mode::NoActivePerception, Mode::NoQuestions};
}

PipelineConfig PipelineConfig::normalized() const {
  PipelineConfig out = *this;
  if (out.mode == Mode::NoQuestions) out.iterations = 0;
  if (out.iterations < 0)
    throw ConfigError("iterations must be non-negative");
  return out;
}

Transcript::Transcript(std::string pinned_timestamp)
    : pinned_(std::move(pinned_timestamp)) {}

int Transcript::add(const std::string& kind, nlohmann::ordered_json payload) {
  TranscriptEvent event;
  event.seq = static_cast<int>(events_.size());
  event.ts = pinned_.empty() ? now_rfc3339() : pinned_;
  event.kind = kind;
  event.payload = std::move(payload);
  events_.push_back(std::move(event));
  return events_.back().seq;
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& event : events_) {
    nlohmann::ordered_json node;
    node["seq"] = event.seq;
    node["ts"] = event.ts;
    node["kind"] = event.kind;
    node["payload"] = event.payload;
    out += node.dump();
    out += '\n';
  }
  return out;
}

std::string initial_description(const std::vector<std::string>& objects) {
  std::string text =
      render_initial_description(PromptRegistry::builtin(), objects).text;
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

Pipeline::Pipeline(const WorldSpec& world, const PipelineConfig& config,
                   const LlmBackend& llm, const VlmBackend& vlm,
                   const PromptRegistry& registry, Transcript& transcript)
    : world_(&world),
      config_(config.normalized()),
      llm_(&llm),
      vlm_(&vlm),
      registry_(&registry),
      transcript_(&transcript) {}

Context Pipeline::initial_context() const {
  Context context;
  context.surface = world_->surface;
  context.initial_description = initial_description(world_->object_names());
  return context;
}

std::string Pipeline::complete_logged(const std::string& role,
                                      const std::string& object, int iteration,
                                      const std::string& prompt,
                                      std::vector<int>* seqs) {
  CompletionRequest request;
  request.prompt = prompt;
  request.script_key = ScriptKey{role, object, iteration};
  const int prompt_seq = transcript_->add(
      "prompt", {{"role", role},
                 {"object", object},
                 {"iteration", iteration},
                 {"text", prompt}});
  const std::string completion = llm_->complete(request);
  const int completion_seq = transcript_->add(
      "completion", {{"role", role},
                     {"object", object},
                     {"iteration", iteration},
                     {"text", completion}});
  if (seqs != nullptr) {
    seqs->push_back(prompt_seq);
    seqs->push_back(completion_seq);
  }
  return completion;
}

ChoiceSelection Pipeline::complete_choice(const std::string& role,
                                          const std::string& object,
                                          int iteration,
                                          const std::string& prompt,
                                          int n_options,
                                          std::vector<int>* seqs) {
  const std::string completion =
      complete_logged(role, object, iteration, prompt, seqs);
  try {
    return parse_choice(completion, n_options);
  } catch (const ParseError&) {
    const std::string retry =
        complete_logged(role, object, iteration, prompt + kNudge, seqs);
    return parse_choice(retry, n_options);
  }
}

Angle Pipeline::choose_angle(const std::string& object,
                             const std::string& question, int iteration) {
  const RenderedPrompt prompt =
      render_angle_prompt(*registry_, world_->object_names(), question);
  const std::string completion =
      complete_logged("angle", object, iteration, prompt.text);
  try {
    return parse_angle_choice(completion);
  } catch (const ParseError&) {
    const std::string retry =
        complete_logged("angle", object, iteration, prompt.text + kNudge);
    return parse_angle_choice(retry);
  }
}

void Pipeline::run_iteration(Context& context, int iteration) {
  if (config_.mode == Mode::NoQuestions)
    throw Error("no_questions mode runs no iterations");

  const auto objects = world_->object_names();
  const bool baseline = config_.mode == Mode::BaselineQuestions;
  RenderedPrompt prompt = baseline
                              ? render_baseline_question_prompt(*registry_, objects)
                              : render_question_prompt(*registry_, objects);

  // HTTP models see their earlier questions so they can ask new ones;
  // scripted fixtures carry the iteration in their key instead.
  std::string prompt_text = prompt.text;
  if (llm_->kind() == "http" && !context.entries.empty()) {
    prompt_text += "\nQuestions you already asked, with their answers:\n";
    for (const auto& entry : context.entries) {
      prompt_text +=
          "`" + entry.object + "`: " + entry.question + " " + entry.answer + "\n";
    }
  }

  const std::string role = baseline ? "baseline_question_gen" : "question_gen";
  const std::string block =
      complete_logged(role, "*", iteration, prompt_text);
  const QuestionSet set = parse_question_block(block, objects);

  for (const auto& question : set.questions) {
    const auto cache_key = std::make_pair(question.object, question.question);
    std::string answer_text;
    auto cached = answer_cache_.find(cache_key);
    if (cached != answer_cache_.end()) {
      answer_text = to_string(cached->second);
    } else {
      Angle angle = Angle::Scene;
      std::string target;
      if (config_.mode != Mode::NoActivePerception) {
        angle = config_.mode == Mode::OursFront
                    ? Angle::Front
                    : choose_angle(question.object, question.question, iteration);
        target = question.object;
      }
      const Photo photo = take_photo(*world_, target, angle, iteration);
      const VqaAnswer answer = vlm_->answer({photo.ref, question.question});
      transcript_->add("vqa", {{"object", question.object},
                               {"target", target.empty() ? "scene" : target},
                               {"angle", to_string(angle)},
                               {"iteration", iteration},
                               {"question", question.question},
                               {"answer", to_string(answer)}});
      question_records_.push_back({question.object, question.question, angle});
      // Unanswered questions stay eligible for a fresh attempt later.
      if (answer != VqaAnswer::Unknown) answer_cache_[cache_key] = answer;
      answer_text = to_string(answer);
    }
    context.entries.push_back(
        {iteration, question.object, question.question, answer_text});
  }
}

ObjectDecision Pipeline::decide(const Context& context,
                                const BenchmarkQuestion& question,
                                int key_iteration) {
  std::optional<std::string> preference;
  auto it = config_.preference_map.find(question.object);
  if (it != config_.preference_map.end()) preference = it->second;

  const RenderedPrompt prompt =
      render_action_prompt(*registry_, context, question, preference);

  ObjectDecision decision;
  decision.object = question.object;
  decision.chosen_option =
      complete_choice("decide", question.object, key_iteration, prompt.text,
                      static_cast<int>(question.options.size()),
                      &decision.transcript);
  decision.action_text =
      question.options[decision.chosen_option.letter - 'a'].action;
  decision.transcript.push_back(transcript_->add(
      "decision", {{"object", decision.object},
                   {"letter", std::string(1, decision.chosen_option.letter)},
                   {"action", decision.action_text}}));
  return decision;
}

std::vector<ProgramOutcome> Pipeline::plan_and_execute(
    WorldState& state, const std::vector<ObjectDecision>& decisions) {
  const auto objects = world_->object_names();
  std::set<std::string> object_set(objects.begin(), objects.end());
  std::set<std::string> receptacle_set(world_->receptacles.begin(),
                                       world_->receptacles.end());
  std::map<std::string, ReceptacleMap> mapping;
  for (const auto& object : world_->objects)
    mapping[object.name] = object.receptacles;

  std::vector<ProgramOutcome> outcomes;
  for (const auto& decision : decisions) {
    ProgramOutcome outcome;
    outcome.object = decision.object;

    const RenderedPrompt prompt = render_codegen_prompt(
        *registry_, decision.action_text, objects, mapping);
    const std::string completion =
        complete_logged("codegen", decision.object, 0, prompt.text);

    dsl::RobotProgram program;
    try {
      std::string body = extract_program(prompt.text + completion);
      bool blank = true;
      for (char c : body) {
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      }
      // "ok to skip" comes back as an empty program; that means done().
      if (blank) body = "robot.done();\n";
      outcome.source = body;
      program = dsl::parse_program(body);
    } catch (const ParseError& ex) {
      outcome.error = ex.what();
      outcome.report.ok = false;
      outcomes.push_back(std::move(outcome));
      continue;
    }

    outcome.report = dsl::validate(program, object_set, receptacle_set, mapping);
    if (outcome.report.ok) {
      const dsl::ExecutionTrace trace = dsl::run_program(program, state);
      for (const auto& event : trace.events) {
        auto payload = dsl::to_json(event);
        payload["object"] = decision.object;
        transcript_->add("skill", std::move(payload));
      }
      outcome.executed = true;
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

PipelineResult run_pipeline(const WorldSpec& world, const PipelineConfig& config,
                            const LlmBackend& llm, const VlmBackend& vlm,
                            const PromptRegistry& registry,
                            Transcript& transcript) {
  Pipeline pipeline(world, config, llm, vlm, registry, transcript);
  const PipelineConfig cfg = config.normalized();

  PipelineResult result;
  result.context = pipeline.initial_context();
  for (int i = 0; i < cfg.iterations; ++i) {
    pipeline.run_iteration(result.context, i);
  }
  for (const auto& question : world.benchmark) {
    result.decisions.push_back(
        pipeline.decide(result.context, question, cfg.iterations));
  }
  result.final_state = initial_state(world);
  result.programs = pipeline.plan_and_execute(result.final_state, result.decisions);
  result.question_records = pipeline.question_records();
  return result;
}

nlohmann::ordered_json to_json(const ObjectDecision& decision) {
  nlohmann::ordered_json node;
  node["object"] = decision.object;
  node["letter"] = std::string(1, decision.chosen_option.letter);
  node["action"] = decision.action_text;
  node["transcript"] = decision.transcript;
  return node;
}

nlohmann::ordered_json to_json(const ProgramOutcome& outcome) {
  nlohmann::ordered_json node;
  node["object"] = outcome.object;
  node["program"] = outcome.source;
  node["executed"] = outcome.executed;
  node["validation"] = dsl::to_json(outcome.report);
  if (!outcome.error.empty()) node["error"] = outcome.error;
  return node;
}

}  // namespace tidyloop
