#include "tidyloop/prompts.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "golden_checks.hpp"
#include "test_support.hpp"
#include "tidyloop/error.hpp"
#include "tidyloop/world.hpp"

using namespace tidyloop;

TEST_CASE("every template render matches its golden transcription") {
  for (const auto& [name, rendered] : test_support::golden_renders()) {
    INFO("golden: ", name);
    CHECK(rendered == test_support::golden(name));
  }
}

TEST_CASE("render determinism") {
  const std::vector<std::string> objects = {"mug", "lamp"};
  const auto a = render_question_prompt(PromptRegistry::builtin(), objects);
  const auto b = render_question_prompt(PromptRegistry::builtin(), objects);
  CHECK(a.text == b.text);
}

TEST_CASE("object list formatting") {
  CHECK(format_object_list({"mug"}) == "`mug`");
  CHECK(format_object_list({"a", "b"}) == "`a`, `b`");
  const auto prompt =
      render_initial_description(PromptRegistry::builtin(), {"mug"});
  CHECK(prompt.text == "These are the objects on the desk: `mug`.\n");
}

TEST_CASE("empty object lists are rejected") {
  const PromptRegistry& reg = PromptRegistry::builtin();
  CHECK_THROWS_AS(render_question_prompt(reg, {}), Error);
  CHECK_THROWS_AS(render_baseline_question_prompt(reg, {}), Error);
  CHECK_THROWS_AS(render_benchmark_gen_prompts(reg, {}), Error);
  CHECK_THROWS_AS(render_angle_prompt(reg, {}, "Is it empty?"), Error);
  CHECK_THROWS_AS(render_angle_prompt(reg, {"mug"}, ""), Error);
}

TEST_CASE("missing slots and residual markers are errors") {
  Template tmpl{"demo", "hello {name}, meet {name}", {"name"}};
  CHECK(tmpl.render({{"name", "ada"}}) == "hello ada, meet ada");
  CHECK_THROWS_AS(tmpl.render({}), Error);
}

TEST_CASE("action prompt without context leads with the object listing") {
  Context context;
  context.initial_description =
      "These are the objects on the desk: `scrunchie`.";
  BenchmarkQuestion question;
  question.object = "scrunchie";
  for (int i = 0; i < 5; ++i)
    question.options.push_back({"state " + std::to_string(i), "action"});
  question.correct = {'a'};
  const auto prompt = render_action_prompt(PromptRegistry::builtin(), context,
                                           question, std::nullopt);
  CHECK(prompt.text.find("These are the objects on the desk:") !=
        std::string::npos);
  CHECK(prompt.text.find("Here is some information") == std::string::npos);
  CHECK(prompt.text.find("The best option is:") != std::string::npos);
}

TEST_CASE("preference paragraph is inserted before the answer cue") {
  Context context;
  context.initial_description = "These are the objects on the desk: `candle`.";
  BenchmarkQuestion question;
  question.object = "candle";
  for (int i = 0; i < 5; ++i) question.options.push_back({"s", "a"});
  question.correct = {'a'};
  const auto prompt =
      render_action_prompt(PromptRegistry::builtin(), context, question,
                           std::string("Don't trim the wick."));
  const auto preference_at =
      prompt.text.find("The owner of the object has a preference");
  const auto cue_at = prompt.text.find("The best option is:");
  REQUIRE(preference_at != std::string::npos);
  REQUIRE(cue_at != std::string::npos);
  CHECK(preference_at < cue_at);
}

TEST_CASE("codegen prompt needs a complete receptacle map") {
  std::map<std::string, ReceptacleMap> mapping = {{"mug", {"shelf", "trash"}}};
  CHECK_THROWS_AS(render_codegen_prompt(PromptRegistry::builtin(), "Tidy up.",
                                        {"mug", "lamp"}, mapping),
                  ReferenceError);
}

TEST_CASE("codegen prompt carries the interface and the open fence") {
  std::map<std::string, ReceptacleMap> mapping = {{"mug", {"shelf", "trash"}}};
  const auto prompt = render_codegen_prompt(PromptRegistry::builtin(),
                                            "Put the mug away.", {"mug"},
                                            mapping);
  CHECK(prompt.text.find("interface RobotManipulationInterface") !=
        std::string::npos);
  const auto program_at = prompt.text.rfind("Program:");
  REQUIRE(program_at != std::string::npos);
  CHECK(prompt.text.substr(program_at) == "Program:\n```\n");
}

TEST_CASE("directory overrides replace template bodies") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tidyloop_template_override";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "vqa.txt", std::ios::binary);
    out << "Q: {question}\n";
  }
  const PromptRegistry registry = PromptRegistry::with_overrides(dir.string());
  CHECK(render_vqa_prompt(registry, "Is it red?").text == "Q: Is it red?\n");
  // builtin untouched
  CHECK(render_vqa_prompt(PromptRegistry::builtin(), "Is it red?").text !=
        "Q: Is it red?\n");
  {
    std::ofstream out(dir / "bogus_id.txt", std::ios::binary);
    out << "x\n";
  }
  CHECK_THROWS_AS(PromptRegistry::with_overrides(dir.string()), ConfigError);
  fs::remove_all(dir);
}
