#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tidyloop/benchmark.hpp"
#include "tidyloop/context.hpp"
#include "tidyloop/prompts.hpp"
#include "tidyloop/world.hpp"

namespace test_support {

// Every committed prompt transcription paired with the render that must
// reproduce it byte for byte.
inline std::vector<std::pair<std::string, std::string>> golden_renders() {
  using namespace tidyloop;
  const PromptRegistry& reg = PromptRegistry::builtin();
  const std::vector<std::string> desk = {"scrunchie", "lotion", "vaseline",
                                         "brush"};

  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("initial_description",
                   render_initial_description(reg, desk).text);
  out.emplace_back("question_prompt", render_question_prompt(reg, desk).text);
  out.emplace_back("question_example",
                   reg.get("question_example").render({}) + "\n");
  out.emplace_back("baseline_question_prompt",
                   render_baseline_question_prompt(reg, desk).text);
  out.emplace_back(
      "angle_prompt",
      render_angle_prompt(reg, {"computer monitor", "cup", "computer wires",
                                "apple"},
                          "Are the `computer wires` connected to anything?")
          .text);

  Context context;
  context.surface = "office desk";
  context.initial_description = "";
  context.entries = {
      {0, "scrunchie", "Is the `scrunchie` neatly placed on the desk?", "Yes"},
      {0, "scrunchie", "Does the `scrunchie` have any stains?", "Yes"},
      {0, "scrunchie", "Does the `scrunchie` have any loose threads?", "No"},
  };
  BenchmarkQuestion scrunchie;
  scrunchie.object = "scrunchie";
  scrunchie.options = {
      {"The scrunchie is neatly coiled and placed on the desk.",
       "Leave the neatly coiled scrunchie as is in a designated area."},
      {"The scrunchie is stretched out and tangled with other items on the "
       "desk.",
       "Untangle, coil neatly, and place in a designated area."},
      {"The scrunchie is dirty or stained and needs to be cleaned.",
       "Clean, dry, and place in a designated area."},
      {"The scrunchie is partially unraveled or damaged.",
       "Repair or replace, and place in a designated area."},
      {"The scrunchie is being used to hold together a bundle of cables or "
       "cords on the desk.",
       "Remove from cables, coil neatly, and place in a designated area."}};
  scrunchie.correct = {'c'};
  out.emplace_back(
      "action_prompt",
      render_action_prompt(reg, context, scrunchie, std::nullopt).text);

  out.emplace_back(
      "preference_suffix",
      reg.get("preference_suffix")
              .render({{"object", "candle"},
                       {"preference",
                        "Don't trim the wick. It doesn't matter whether the "
                        "burnt part of the candle wick is excessively long "
                        "because I can still light it."}}) +
          "\n");

  const auto benchmark_prompts = render_benchmark_gen_prompts(reg, desk);
  out.emplace_back("benchmark_q1", benchmark_prompts.first.text);
  out.emplace_back("benchmark_q2", benchmark_prompts.second.text);

  out.emplace_back("codegen_api", reg.get("codegen_api").render({}) + "\n");
  out.emplace_back("codegen_icl_instruction",
                   reg.get("codegen_icl_instruction").render({}) + "\n");
  out.emplace_back("codegen_example_one",
                   reg.get("codegen_example_one").render({}) + "\n");
  out.emplace_back("codegen_example_two",
                   reg.get("codegen_example_two").render({}) + "\n");
  out.emplace_back("codegen_example_three",
                   reg.get("codegen_example_three").render({}) + "\n");

  const std::vector<std::string> fruit = {"apple", "orange", "half-eaten peach",
                                          "coffee cup", "pink plate"};
  std::map<std::string, ReceptacleMap> fruit_map = {
      {"apple", {"counter", "trash"}},
      {"orange", {"counter", "trash"}},
      {"half-eaten peach", {"counter", "trash"}},
      {"coffee cup", {"counter", "recycling"}},
      {"pink plate", {"counter", "sink"}}};
  out.emplace_back(
      "codegen_prompt",
      render_codegen_prompt(reg, "Throw away the half-eaten apple.", fruit,
                            fruit_map)
          .text);

  out.emplace_back(
      "vqa_prompt",
      render_vqa_prompt(reg, "Is the bagel sandwich partially eaten?").text);
  return out;
}

}  // namespace test_support
