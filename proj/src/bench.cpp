#include "tidyloop/bench.hpp"

#include <cstdio>
#include <map>

#include "tidyloop/error.hpp"

namespace tidyloop {

double score(const std::vector<ObjectDecision>& decisions,
             const std::vector<BenchmarkQuestion>& questions) {
  std::map<std::string, const ObjectDecision*> by_object;
  for (const auto& decision : decisions) by_object[decision.object] = &decision;

  int scoreable = 0;
  int correct = 0;
  for (const auto& question : questions) {
    if (question.omitted) continue;
    ++scoreable;
    auto it = by_object.find(question.object);
    if (it == by_object.end())
      throw Error("no decision for benchmark object '" + question.object + "'");
    if (question.correct.count(it->second->chosen_option.letter) > 0) ++correct;
  }
  if (scoreable == 0) throw Error("no scoreable questions");
  return static_cast<double>(correct) / static_cast<double>(scoreable);
}

namespace {

const Attribute* find_phrase(const WorldSpec& world, const std::string& object,
                             const std::string& question) {
  const SimObject* sim = world.find_object(object);
  if (sim == nullptr) return nullptr;
  for (const auto& attribute : sim->attributes) {
    if (attribute.phrase == question) return &attribute;
  }
  return nullptr;
}

double visible_fraction(const Attribute& attribute,
                        const std::vector<Angle>& angles) {
  if (angles.empty()) return 0.0;
  int visible = 0;
  for (Angle angle : angles) {
    if (attribute.visible_from.count(angle) > 0) ++visible;
  }
  return static_cast<double>(visible) / static_cast<double>(angles.size());
}

}  // namespace

AnswerabilityReport answerability(const WorldSpec& world,
                                  const std::vector<QuestionRecord>& records) {
  AnswerabilityReport report;
  for (const auto& record : records) {
    const Attribute* attribute =
        find_phrase(world, record.object, record.question);
    if (attribute == nullptr) continue;  // non-canonical question

    report.scene += attribute->visible_from.count(Angle::Scene) > 0 ? 1.0 : 0.0;
    report.front += attribute->visible_from.count(Angle::Front) > 0 ? 1.0 : 0.0;
    report.llm_angle +=
        attribute->visible_from.count(record.chosen_angle) > 0 ? 1.0 : 0.0;

    std::vector<Angle> non_llm;
    std::vector<Angle> non_front;
    for (Angle angle : kCloseUpAngles) {
      if (angle != record.chosen_angle) non_llm.push_back(angle);
      if (angle != Angle::Front) non_front.push_back(angle);
    }
    report.non_llm += visible_fraction(*attribute, non_llm);
    report.non_front += visible_fraction(*attribute, non_front);
    ++report.n_questions;
  }
  if (report.n_questions > 0) {
    const double n = report.n_questions;
    report.scene /= n;
    report.front /= n;
    report.llm_angle /= n;
    report.non_llm /= n;
    report.non_front /= n;
  }
  return report;
}

EvalReport evaluate_mode(const WorldSpec& world, const PipelineConfig& config,
                         const LlmBackend& llm, const VlmBackend& vlm,
                         const PromptRegistry& registry, Transcript& transcript) {
  const PipelineConfig cfg = config.normalized();
  Pipeline pipeline(world, cfg, llm, vlm, registry, transcript);
  Context context = pipeline.initial_context();

  EvalReport report;
  report.mode = cfg.mode;
  report.iterations = cfg.iterations;

  auto score_checkpoint = [&](int key_iteration) {
    std::vector<ObjectDecision> decisions;
    for (const auto& question : world.benchmark) {
      decisions.push_back(pipeline.decide(context, question, key_iteration));
    }
    return score(decisions, world.benchmark);
  };

  if (cfg.iterations == 0) {
    report.per_iteration_accuracy.push_back(score_checkpoint(0));
  } else {
    for (int i = 0; i < cfg.iterations; ++i) {
      pipeline.run_iteration(context, i);
      report.per_iteration_accuracy.push_back(score_checkpoint(i + 1));
    }
  }

  report.answerability = answerability(world, pipeline.question_records());
  int scoreable = 0;
  for (const auto& question : world.benchmark) {
    if (!question.omitted) ++scoreable;
  }
  report.n_questions = scoreable;
  return report;
}

std::vector<BenchmarkQuestion> generate_benchmark(const WorldSpec& world,
                                                  const LlmBackend& llm,
                                                  const PromptRegistry& registry,
                                                  Transcript& transcript) {
  const auto names = world.object_names();
  const auto [stage1_prompt, stage2_prompt] =
      render_benchmark_gen_prompts(registry, names);

  auto complete = [&](const std::string& role, const std::string& prompt) {
    CompletionRequest request;
    request.prompt = prompt;
    request.script_key = ScriptKey{role, "*", 0};
    transcript.add("prompt",
                   {{"role", role}, {"object", "*"}, {"iteration", 0},
                    {"text", prompt}});
    const std::string completion = llm.complete(request);
    transcript.add("completion",
                   {{"role", role}, {"object", "*"}, {"iteration", 0},
                    {"text", completion}});
    return completion;
  };

  const std::string stage1 = complete("benchmark_q1", stage1_prompt.text);
  // Stage 2 continues the same exchange.
  const std::string stage2 = complete(
      "benchmark_q2", stage1_prompt.text + stage1 + "\n\n" + stage2_prompt.text);

  std::vector<BenchmarkQuestion> questions;
  for (const auto& object : world.objects) {
    const auto pairs = parse_benchmark_options(stage1, stage2, object.name);
    BenchmarkQuestion question;
    question.object = object.name;
    for (const auto& pair : pairs)
      question.options.push_back({pair.state, pair.action});
    if (object.ground_truth_options.empty())
      throw Error("object '" + object.name +
                  "' has no ground_truth_options for benchmark labeling");
    question.correct = object.ground_truth_options;
    question.provenance = LabelProvenance::SyntheticGroundTruth;
    question.check();
    questions.push_back(std::move(question));
  }
  return questions;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json node;
  node["mode"] = to_string(report.mode);
  node["iterations"] = report.iterations;
  node["n_questions"] = report.n_questions;
  node["per_iteration_accuracy"] = report.per_iteration_accuracy;
  node["answerability"] = {{"scene", report.answerability.scene},
                           {"non_front", report.answerability.non_front},
                           {"front", report.answerability.front},
                           {"non_llm", report.answerability.non_llm},
                           {"llm_angle", report.answerability.llm_angle}};
  node["answerability_n"] = report.answerability.n_questions;
  return node;
}

namespace {

std::string answerability_row(const std::string& label,
                              const AnswerabilityReport& a) {
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "%-22s %8.3f %10.3f %8.3f %9.3f %10.3f", label.c_str(), a.scene,
                a.non_front, a.front, a.non_llm, a.llm_angle);
  return buffer;
}

constexpr const char* kAnswerabilityHeader =
    "                          scene  non-front    front   non-LLM  LLM angle";

}  // namespace

std::string format_report_table(const EvalReport& report) {
  std::string out = "mode: " + to_string(report.mode) + "\n";
  out += "questions: " + std::to_string(report.n_questions) + "\n";
  out += "accuracy by iteration:\n";
  for (size_t i = 0; i < report.per_iteration_accuracy.size(); ++i) {
    const size_t label = report.iterations == 0 ? 0 : i + 1;
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "  %2zu  %.3f\n", label,
                  report.per_iteration_accuracy[i]);
    out += buffer;
  }
  out += "answerability (fraction of questions answerable per angle class):\n";
  out += kAnswerabilityHeader;
  out += "\n";
  out += answerability_row(to_string(report.mode), report.answerability);
  out += "\n";
  return out;
}

std::string format_summary_table(const std::vector<EvalReport>& reports) {
  std::string out = kAnswerabilityHeader;
  out += "   final acc\n";
  for (const auto& report : reports) {
    out += answerability_row(to_string(report.mode), report.answerability);
    char buffer[32];
    const double final_accuracy = report.per_iteration_accuracy.empty()
                                      ? 0.0
                                      : report.per_iteration_accuracy.back();
    std::snprintf(buffer, sizeof(buffer), " %11.3f", final_accuracy);
    out += buffer;
    out += "\n";
  }
  return out;
}

}  // namespace tidyloop
