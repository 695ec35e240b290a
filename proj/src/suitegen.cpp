#include "tidyloop/suitegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "tidyloop/error.hpp"
#include "tidyloop/pipeline.hpp"

namespace tidyloop {
namespace {

std::string object_name(int index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "item%02d", index + 1);
  return buffer;
}

char angle_letter(Angle angle) {
  switch (angle) {
    case Angle::Top:
      return 'a';
    case Angle::Right:
      return 'b';
    case Angle::Left:
      return 'c';
    case Angle::Front:
      return 'd';
    case Angle::Back:
      return 'e';
    case Angle::Scene:
      break;
  }
  throw Error("no angle letter for SCENE");
}

const char* angle_option_text(Angle angle) {
  switch (angle) {
    case Angle::Top:
      return "Top of the object";
    case Angle::Right:
      return "Right side of the object";
    case Angle::Left:
      return "Left side of the object";
    case Angle::Front:
      return "Front of the object";
    case Angle::Back:
      return "Behind the object";
    case Angle::Scene:
      break;
  }
  throw Error("no angle option for SCENE");
}

}  // namespace

SyntheticSuite make_synthetic_suite(const SuiteParams& params) {
  if (params.n_objects < 1) throw ConfigError("suite needs at least 1 object");
  if (params.iterations < 1) throw ConfigError("suite needs at least 1 iteration");
  const int n = params.n_objects;

  SyntheticSuite suite;
  suite.world.surface = "synthetic desk";
  suite.world.receptacles = {"storage bin", "shelf"};

  std::mt19937 rng(params.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const int scene_count = std::min(
      n, static_cast<int>(std::lround(params.scene_visible_fraction * n)));
  std::vector<bool> scene_visible(n, false);
  for (int i = 0; i < scene_count; ++i) scene_visible[order[i]] = true;

  // Best angles cycle through the close-up set; every best==FRONT object is
  // necessarily front-visible, the rest are drawn from the shuffle.
  std::vector<Angle> best(n);
  std::vector<bool> front_visible(n, false);
  int front_count = 0;
  for (int i = 0; i < n; ++i) {
    best[i] = kCloseUpAngles[i % kCloseUpAngles.size()];
    if (best[i] == Angle::Front) {
      front_visible[i] = true;
      ++front_count;
    }
  }
  const int front_target = std::clamp(
      static_cast<int>(std::lround(params.front_visible_fraction * n)),
      front_count, n);
  for (int i = 0; i < n && front_count < front_target; ++i) {
    const int pick = order[i];
    if (!front_visible[pick]) {
      front_visible[pick] = true;
      ++front_count;
    }
  }

  suite.scene_visible_count = scene_count;
  suite.front_visible_count = front_count;

  std::vector<bool> truth(n);
  for (int i = 0; i < n; ++i) truth[i] = (i % 2) == 0;

  for (int i = 0; i < n; ++i) {
    SimObject object;
    object.name = object_name(i);
    Attribute attribute;
    attribute.key = "needs_put_away";
    attribute.phrase = "Does the `" + object.name + "` need to be put away?";
    attribute.truth = truth[i];
    attribute.visible_from.insert(best[i]);
    if (front_visible[i]) attribute.visible_from.insert(Angle::Front);
    if (scene_visible[i]) attribute.visible_from.insert(Angle::Scene);
    object.attributes.push_back(std::move(attribute));
    object.receptacles = {"shelf", "storage bin"};
    object.ground_truth_options = {truth[i] ? 'a' : 'b'};
    suite.world.objects.push_back(std::move(object));

    BenchmarkQuestion question;
    question.object = object_name(i);
    const std::string name = "`" + question.object + "`";
    question.options = {
        {"The " + name + " is out of place on the desk.",
         "Put the " + name + " away in the storage bin."},
        {"The " + name + " is already where it belongs.",
         "Leave the " + name + " as is."},
        {"The " + name + " is broken.",
         "Set the " + name + " aside for repair."},
        {"The " + name + " is dusty.",
         "Wipe the " + name + " down and return it."},
        {"The " + name + " cannot be assessed from here.",
         "Inspect the " + name + " more closely before tidying."}};
    question.correct = {truth[i] ? 'a' : 'b'};
    question.provenance = LabelProvenance::SyntheticGroundTruth;
    suite.world.benchmark.push_back(std::move(question));
  }

  // Question-generation fixtures: one block per object, identical phrasing
  // every iteration (repeat questions resolve from the answer cache).
  std::string reasoned_block;
  std::string baseline_block;
  for (int i = 0; i < n; ++i) {
    const std::string name = object_name(i);
    const std::string phrase = suite.world.objects[i].attributes[0].phrase;
    reasoned_block += "-`" + name + "`:\n";
    reasoned_block += "Socially motivated reasoning: You should put the `" +
                      name + "` away if it does not belong on the desk.\n\n";
    reasoned_block +=
        "Resulting question (that can be answered by taking a picture of "
        "object): " +
        phrase + "\n\n";
    reasoned_block += "(a) Yes (b) No (c) Cannot answer from image\n\n";
    baseline_block += "`" + name + "`: " + phrase + "\n";
  }
  for (int i = 0; i < params.iterations; ++i) {
    const std::string iter = std::to_string(i);
    suite.llm_fixtures["question_gen/*/" + iter] = reasoned_block;
    suite.llm_fixtures["baseline_question_gen/*/" + iter] = baseline_block;
    for (int k = 0; k < n; ++k) {
      const Angle angle = best[k];
      suite.llm_fixtures["angle/" + object_name(k) + "/" + iter] =
          std::string("The clearest view is\n\n(") + angle_letter(angle) +
          ") " + angle_option_text(angle);
    }
  }

  // Decide fixtures differ per mode: each mode resolves an object's
  // attribute only if its answering angle class reveals it.
  struct ModeVisibility {
    Mode mode;
    const std::vector<bool>* resolved;
  };
  std::vector<bool> all_resolved(n, true);
  std::vector<bool> none_resolved(n, false);
  const std::vector<ModeVisibility> mode_list = {
      {Mode::OursLlm, &all_resolved},
      {Mode::BaselineQuestions, &all_resolved},
      {Mode::OursFront, &front_visible},
      {Mode::NoActivePerception, &scene_visible},
      {Mode::NoQuestions, &none_resolved},
  };
  for (const auto& mode : mode_list) {
    auto& overlay = suite.mode_overlays[to_string(mode.mode)];
    for (int k = 0; k < n; ++k) {
      const std::string name = object_name(k);
      std::string resolved_letter = truth[k] ? "(a)" : "(b)";
      for (int key_iter = 0; key_iter <= params.iterations; ++key_iter) {
        const bool resolved = key_iter >= 1 && (*mode.resolved)[k];
        const std::string letter = resolved ? resolved_letter : "(e)";
        overlay["decide/" + name + "/" + std::to_string(key_iter)] =
            "The best option is: " + letter;
      }
      // Code generation mirrors the final decision for the mode.
      const bool final_resolved =
          params.iterations >= 1 && (*mode.resolved)[k];
      std::string program;
      if (!final_resolved) {
        program = "robot.done();";
      } else if (truth[k]) {
        program = "robot.set_designated(\"storage bin\");\nrobot.cleanup(\"" +
                  name + "\");\nrobot.done();";
      } else {
        program = "robot.leave_alone(\"" + name + "\");\nrobot.done();";
      }
      overlay["codegen/" + name + "/0"] = program + "\n```\n";
    }
  }

  return suite;
}

void write_synthetic_suite(const SyntheticSuite& suite,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root / "manifests");
  fs::create_directories(root / "fixtures");

  auto write_file = [](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
  };

  write_file(root / "manifests" / "synthetic.json",
             to_json(suite.world).dump(2) + "\n");

  auto dump_fixtures = [](const std::map<std::string, std::string>& fixtures) {
    nlohmann::ordered_json doc;
    for (const auto& [key, value] : fixtures) doc[key] = value;
    return doc.dump(2) + "\n";
  };
  write_file(root / "fixtures" / "llm.json", dump_fixtures(suite.llm_fixtures));
  for (const auto& [mode, overlay] : suite.mode_overlays) {
    write_file(root / "fixtures" / ("llm." + mode + ".json"),
               dump_fixtures(overlay));
  }
}

}  // namespace tidyloop
