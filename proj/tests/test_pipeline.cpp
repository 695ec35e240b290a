#include "tidyloop/pipeline.hpp"

#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "tidyloop/error.hpp"

using namespace tidyloop;

namespace {

PipelineConfig kitchen_config(Mode mode, int iterations = 5) {
  PipelineConfig config;
  config.mode = mode;
  config.iterations = iterations;
  return config;
}

}  // namespace

TEST_CASE("initial description matches the fixed format") {
  CHECK(initial_description({"scrunchie", "lotion", "vaseline", "brush"}) ==
        "These are the objects on the desk: `scrunchie`, `lotion`, "
        "`vaseline`, `brush`.");
  CHECK(initial_description({"mug"}) ==
        "These are the objects on the desk: `mug`.");
}

TEST_CASE("kitchen run gathers one entry per object per iteration") {
  const WorldSpec world = test_support::fixture_world("kitchen");
  const ScriptedLlm llm =
      ScriptedLlm::load(test_support::fixture_dir("kitchen"), "ours_llm");
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  Pipeline pipeline(world, kitchen_config(Mode::OursLlm), llm, vlm,
                    PromptRegistry::builtin(), transcript);

  Context context = pipeline.initial_context();
  CHECK(context.initial_description ==
        "These are the objects on the desk: `banana`, `soda can`, `coffee "
        "cup`, `pink plate`.");

  pipeline.run_iteration(context, 0);
  REQUIRE(context.entries.size() == 4);
  CHECK(context.entries[0].object == "banana");
  CHECK(context.entries[0].answer == "Yes");
  CHECK(context.entries[2].object == "coffee cup");
  CHECK(context.entries[2].answer == "No");

  // the remaining iterations hit the answer cache but still append
  for (int i = 1; i < 5; ++i) pipeline.run_iteration(context, i);
  CHECK(context.entries.size() == 20);
}

TEST_CASE("context is append-only across iterations") {
  const WorldSpec world = test_support::fixture_world("kitchen");
  const ScriptedLlm llm =
      ScriptedLlm::load(test_support::fixture_dir("kitchen"), "ours_llm");
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  Pipeline pipeline(world, kitchen_config(Mode::OursLlm), llm, vlm,
                    PromptRegistry::builtin(), transcript);
  Context context = pipeline.initial_context();
  std::vector<ContextEntry> snapshot;
  for (int i = 0; i < 5; ++i) {
    pipeline.run_iteration(context, i);
    REQUIRE(context.entries.size() >= snapshot.size());
    for (size_t k = 0; k < snapshot.size(); ++k) {
      CHECK(context.entries[k].question == snapshot[k].question);
      CHECK(context.entries[k].answer == snapshot[k].answer);
    }
    snapshot = context.entries;
  }
}

TEST_CASE("no_active_perception answers from the scene image only") {
  const WorldSpec world = test_support::fixture_world("kitchen");
  const ScriptedLlm llm = ScriptedLlm::load(test_support::fixture_dir("kitchen"),
                                            "no_active_perception");
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  Pipeline pipeline(world, kitchen_config(Mode::NoActivePerception), llm, vlm,
                    PromptRegistry::builtin(), transcript);
  Context context = pipeline.initial_context();
  pipeline.run_iteration(context, 0);
  REQUIRE(context.entries.size() == 4);
  CHECK(context.entries[0].object == "banana");
  CHECK(context.entries[0].answer == "Unknown");  // banana is occluded
  CHECK(context.entries[3].object == "pink plate");
  CHECK(context.entries[3].answer == "Yes");  // plate is scene-visible
}

TEST_CASE("iterations=0 leaves the context unchanged") {
  const WorldSpec world = test_support::fixture_world("kitchen");
  const ScriptedLlm llm =
      ScriptedLlm::load(test_support::fixture_dir("kitchen"), "ours_llm");
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  PipelineConfig config = kitchen_config(Mode::OursLlm, 0);
  Pipeline pipeline(world, config, llm, vlm, PromptRegistry::builtin(),
                    transcript);
  Context context = pipeline.initial_context();
  CHECK(context.entries.empty());
}

TEST_CASE("no_questions normalizes to zero iterations") {
  PipelineConfig config = kitchen_config(Mode::NoQuestions, 5);
  CHECK(config.normalized().iterations == 0);
}

TEST_CASE("decide parses the scripted letter and records the action") {
  const WorldSpec world = test_support::fixture_world("scrunchie_desk");
  ScriptedLlm llm(std::map<std::string, std::string>{{"decide/scrunchie/0", "The best option is: (b)"}});
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  Pipeline pipeline(world, kitchen_config(Mode::NoQuestions), llm, vlm,
                    PromptRegistry::builtin(), transcript);
  const Context context = pipeline.initial_context();
  const ObjectDecision decision =
      pipeline.decide(context, world.benchmark[0], 0);
  CHECK(decision.chosen_option.letter == 'b');
  CHECK(decision.action_text ==
        "Untangle, coil neatly, and place in a designated area.");
  // the rendered prompt led with the object list, not gathered Q&A
  bool found_prompt = false;
  for (const auto& event : transcript.events()) {
    if (event.kind == "prompt") {
      found_prompt = true;
      const std::string text = event.payload.at("text").get<std::string>();
      CHECK(text.find("These are the objects on the desk:") !=
            std::string::npos);
      CHECK(text.find("Here is some information") == std::string::npos);
    }
  }
  CHECK(found_prompt);
}

TEST_CASE("preferences append the owner paragraph to the action prompt") {
  const WorldSpec world = test_support::fixture_world("scrunchie_desk");
  ScriptedLlm llm(std::map<std::string, std::string>{{"decide/scrunchie/0", "(a)"}});
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  PipelineConfig config = kitchen_config(Mode::NoQuestions);
  config.preference_map["scrunchie"] = "Don't trim the wick.";
  Pipeline pipeline(world, config, llm, vlm, PromptRegistry::builtin(),
                    transcript);
  pipeline.decide(pipeline.initial_context(), world.benchmark[0], 0);
  const std::string prompt =
      transcript.events()[0].payload.at("text").get<std::string>();
  CHECK(prompt.find("The owner of the object has a preference on how you "
                    "should tidy the `scrunchie`: Don't trim the wick.") !=
        std::string::npos);
}

TEST_CASE("a malformed decide completion is retried once with a nudge") {
  const WorldSpec world = test_support::fixture_world("scrunchie_desk");
  // scripted backends return the same text again, so the retry also fails
  ScriptedLlm llm(std::map<std::string, std::string>{{"decide/scrunchie/0", "hmm"}});
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  Pipeline pipeline(world, kitchen_config(Mode::NoQuestions), llm, vlm,
                    PromptRegistry::builtin(), transcript);
  CHECK_THROWS_AS(pipeline.decide(pipeline.initial_context(),
                                  world.benchmark[0], 0),
                  ParseError);
  int prompts = 0;
  for (const auto& event : transcript.events()) {
    if (event.kind == "prompt") ++prompts;
  }
  CHECK(prompts == 2);
  CHECK(transcript.events()[2].payload.at("text").get<std::string>().find(
            "Answer with a single option letter.") != std::string::npos);
}

TEST_CASE("full kitchen run executes the decided programs") {
  const WorldSpec world = test_support::fixture_world("kitchen");
  const ScriptedLlm llm =
      ScriptedLlm::load(test_support::fixture_dir("kitchen"), "ours_llm");
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  const PipelineResult result =
      run_pipeline(world, kitchen_config(Mode::OursLlm), llm, vlm,
                   PromptRegistry::builtin(), transcript);

  REQUIRE(result.decisions.size() == 4);
  CHECK(result.decisions[0].chosen_option.letter == 'a');
  CHECK(result.decisions[2].chosen_option.letter == 'b');

  CHECK(result.final_state.find("banana")->location ==
        Location::in_receptacle("trash can"));
  CHECK(result.final_state.find("soda can")->location ==
        Location::in_receptacle("recycling bin"));
  CHECK(result.final_state.find("coffee cup")->location ==
        Location::on_surface());
  CHECK(result.final_state.find("coffee cup")->handled);
  CHECK(result.final_state.find("pink plate")->location ==
        Location::in_receptacle("sink"));
  for (const auto& outcome : result.programs) CHECK(outcome.executed);
}

TEST_CASE("invalid generated programs are reported and skipped") {
  const WorldSpec world = test_support::fixture_world("scrunchie_desk");
  ScriptedLlm llm(std::map<std::string, std::string>{{"decide/scrunchie/0", "(a)"},
                   {"codegen/scrunchie/0",
                    "robot.cleanup(\"ghost\");\nrobot.done();\n```\n"}});
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  PipelineConfig config = kitchen_config(Mode::NoQuestions);
  Pipeline pipeline(world, config, llm, vlm, PromptRegistry::builtin(),
                    transcript);
  const Context context = pipeline.initial_context();
  std::vector<ObjectDecision> decisions = {
      pipeline.decide(context, world.benchmark[0], 0)};
  WorldState state = initial_state(world);
  const auto outcomes = pipeline.plan_and_execute(state, decisions);
  REQUIRE(outcomes.size() == 1);
  CHECK_FALSE(outcomes[0].executed);
  CHECK_FALSE(outcomes[0].report.ok);
  bool has_r1 = false;
  bool has_r2 = false;
  for (const auto& violation : outcomes[0].report.violations) {
    if (violation.rule == "R1") has_r1 = true;
    if (violation.rule == "R2") has_r2 = true;
  }
  CHECK(has_r1);
  CHECK(has_r2);
  for (const auto& object : state.objects) {
    CHECK(object.location == Location::on_surface());
    CHECK_FALSE(object.handled);
  }
}

TEST_CASE("a leave-as-is decision becomes a leave_alone program") {
  const WorldSpec world = test_support::fixture_world("scrunchie_desk");
  ScriptedLlm llm(std::map<std::string, std::string>{{"decide/scrunchie/0", "(a)"},
                   {"codegen/scrunchie/0",
                    "robot.leave_alone(\"scrunchie\");\nrobot.done();\n```\n"}});
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  Pipeline pipeline(world, kitchen_config(Mode::NoQuestions), llm, vlm,
                    PromptRegistry::builtin(), transcript);
  const Context context = pipeline.initial_context();
  std::vector<ObjectDecision> decisions = {
      pipeline.decide(context, world.benchmark[0], 0)};
  WorldState state = initial_state(world);
  const auto outcomes = pipeline.plan_and_execute(state, decisions);
  CHECK(outcomes[0].executed);
  CHECK(state.find("scrunchie")->location == Location::on_surface());
  CHECK(state.find("scrunchie")->handled);
}

TEST_CASE("an empty generated program means done") {
  const WorldSpec world = test_support::fixture_world("scrunchie_desk");
  ScriptedLlm llm(std::map<std::string, std::string>{{"decide/scrunchie/0", "(a)"},
                   {"codegen/scrunchie/0", "```\n"}});
  const OracleVlm vlm(world);
  Transcript transcript("2024-01-01T00:00:00Z");
  Pipeline pipeline(world, kitchen_config(Mode::NoQuestions), llm, vlm,
                    PromptRegistry::builtin(), transcript);
  const Context context = pipeline.initial_context();
  std::vector<ObjectDecision> decisions = {
      pipeline.decide(context, world.benchmark[0], 0)};
  WorldState state = initial_state(world);
  const auto outcomes = pipeline.plan_and_execute(state, decisions);
  CHECK(outcomes[0].executed);
  CHECK(outcomes[0].source == "robot.done();\n");
  CHECK(state.find("scrunchie")->location == Location::on_surface());
  CHECK_FALSE(state.find("scrunchie")->handled);
}

TEST_CASE("scripted runs are reproducible event for event") {
  const WorldSpec world = test_support::fixture_world("kitchen");
  const ScriptedLlm llm =
      ScriptedLlm::load(test_support::fixture_dir("kitchen"), "ours_llm");
  const OracleVlm vlm(world);
  Transcript first("2024-01-01T00:00:00Z");
  Transcript second("2024-01-01T00:00:00Z");
  run_pipeline(world, kitchen_config(Mode::OursLlm), llm, vlm,
               PromptRegistry::builtin(), first);
  run_pipeline(world, kitchen_config(Mode::OursLlm), llm, vlm,
               PromptRegistry::builtin(), second);
  CHECK(first.to_jsonl() == second.to_jsonl());
}
