// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Run directly (or via ctest) after building.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "../golden_checks.hpp"
#include "../test_support.hpp"
#include "tidyloop/bench.hpp"
#include "tidyloop/clients.hpp"
#include "tidyloop/dsl.hpp"
#include "tidyloop/error.hpp"
#include "tidyloop/pipeline.hpp"
#include "tidyloop/suitegen.hpp"

namespace fs = std::filesystem;
using namespace tidyloop;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int number, const char* name, bool ok, double elapsed) {
  std::printf("[%s] criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", number,
              name, elapsed);
  std::fflush(stdout);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tidyloop_accept_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_tool(const std::string& args) {
  const std::string command =
      std::string(TIDYLOOP_BIN) + " " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(command.c_str()));
}

}  // namespace

TEST_CASE("criterion 1: prompt fidelity against golden transcriptions") {
  const auto start = Clock::now();
  bool ok = true;
  int checked = 0;
  for (const auto& [name, rendered] : test_support::golden_renders()) {
    const std::string expected = test_support::golden(name);
    if (rendered != expected) {
      ok = false;
      std::printf("  golden mismatch: %s\n", name.c_str());
    }
    ++checked;
  }
  const double elapsed = seconds_since(start);
  report(1, "prompt fidelity", ok && checked >= 14 && elapsed < 1.0, elapsed);
  CHECK(ok);
  CHECK(checked >= 14);
  CHECK(elapsed < 1.0);
}

namespace {

// Independent recognizer for criterion 2. Works backwards from each
// relocate/cleanup instead of tracking a register, and checks the
// termination shape up front.
bool reference_accepts(const std::vector<dsl::Statement>& prog,
                       const std::string& object, const std::string& r1,
                       const std::string& r2) {
  using dsl::Func;
  if (prog.empty()) return false;
  if (prog.back().func != Func::Done) return false;
  int dones = 0;
  for (const auto& stmt : prog) {
    if (stmt.func == Func::Done) ++dones;
  }
  if (dones != 1) return false;
  for (size_t i = 0; i < prog.size(); ++i) {
    const auto& stmt = prog[i];
    switch (stmt.func) {
      case Func::SetDesignated:
        if (*stmt.arg != r1 && *stmt.arg != r2) return false;
        break;
      case Func::LeaveAlone:
        if (*stmt.arg != object) return false;
        break;
      case Func::Relocate:
      case Func::Cleanup: {
        if (*stmt.arg != object) return false;
        bool anchored = false;
        for (size_t j = i; j-- > 0;) {
          if (prog[j].func == Func::Done) break;
          if (prog[j].func == Func::SetDesignated) {
            anchored = true;
            break;
          }
        }
        if (!anchored) return false;
        break;
      }
      case Func::Done:
        break;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("criterion 2: validator equals the exhaustive reference recognizer") {
  const auto start = Clock::now();
  const std::string object = "cup";
  const std::string r1 = "bin";
  const std::string r2 = "shelf";
  const std::set<std::string> objects = {object};
  const std::set<std::string> receptacles = {r1, r2};
  const std::map<std::string, ReceptacleMap> mapping = {
      {object, ReceptacleMap{r1, r2}}};

  // statement alphabet: every function crossed with every name (13 total)
  std::vector<dsl::Statement> alphabet;
  for (const std::string& arg : {object, r1, r2}) {
    alphabet.push_back({dsl::Func::LeaveAlone, arg});
    alphabet.push_back({dsl::Func::SetDesignated, arg});
    alphabet.push_back({dsl::Func::Relocate, arg});
    alphabet.push_back({dsl::Func::Cleanup, arg});
  }
  alphabet.push_back({dsl::Func::Done, std::nullopt});

  long long total = 0;
  long long disagreements = 0;
  std::vector<size_t> indices;
  const size_t n = alphabet.size();
  for (int length = 1; length <= 3; ++length) {
    indices.assign(length, 0);
    while (true) {
      dsl::RobotProgram program;
      for (int k = 0; k < length; ++k)
        program.statements.push_back(alphabet[indices[k]]);
      ++total;
      const bool validator_ok =
          dsl::validate(program, objects, receptacles, mapping).ok;
      const bool reference_ok =
          reference_accepts(program.statements, object, r1, r2);
      if (validator_ok != reference_ok) {
        ++disagreements;
        if (disagreements <= 5)
          std::printf("  disagreement on: %s", print_program(program).c_str());
      }
      // odometer increment
      int pos = length - 1;
      while (pos >= 0 && ++indices[pos] == n) {
        indices[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok = disagreements == 0 && total == 13 + 13 * 13 + 13 * 13 * 13 &&
                  elapsed < 5.0;
  report(2, "DSL validator oracle equivalence", ok, elapsed);
  CHECK(disagreements == 0);
  CHECK(total == 2379);
  CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 3: end-to-end determinism of cmd_run") {
  const auto start = Clock::now();
  const fs::path out_a = scratch("det_a");
  const fs::path out_b = scratch("det_b");
  const std::string world =
      (test_support::source_dir() / "fixtures" / "worlds" / "kitchen.json")
          .string();
  const std::string args =
      "run --world " + world +
      " --mode ours_llm --iterations 5 --llm scripted --vlm oracle"
      " --fixtures " + test_support::fixture_dir("kitchen") +
      " --pin-timestamp 2024-01-01T00:00:00Z --out ";
  const int code_a = run_tool(args + out_a.string());
  const int code_b = run_tool(args + out_b.string());

  bool identical = code_a == 0 && code_b == 0;
  for (const char* file :
       {"transcript.jsonl", "decisions.json", "world_state.json"}) {
    identical = identical && test_support::read_file(out_a / file) ==
                                 test_support::read_file(out_b / file);
  }
  const double elapsed = seconds_since(start);
  report(3, "end-to-end determinism", identical, elapsed);
  CHECK(code_a == 0);
  CHECK(code_b == 0);
  CHECK(identical);
}

namespace {

struct SuiteRun {
  SyntheticSuite suite;
  fs::path fixtures;
  std::map<Mode, EvalReport> reports;
};

SuiteRun evaluate_synthetic_suite() {
  SuiteRun run;
  run.suite = make_synthetic_suite(SuiteParams{});
  const fs::path dir = scratch("suite");
  write_synthetic_suite(run.suite, dir.string());
  run.fixtures = dir / "fixtures";
  const WorldSpec world =
      load_world((dir / "manifests" / "synthetic.json").string());

  for (Mode mode : all_modes()) {
    PipelineConfig config;
    config.mode = mode;
    config.iterations = 5;
    const ScriptedLlm llm =
        ScriptedLlm::load(run.fixtures.string(), to_string(mode));
    const OracleVlm vlm(world);
    Transcript transcript("2024-01-01T00:00:00Z");
    run.reports[mode] = evaluate_mode(world, config, llm, vlm,
                                      PromptRegistry::builtin(), transcript);
  }
  return run;
}

}  // namespace

TEST_CASE("criteria 4 and 5: mode separation and answerability ordering") {
  const auto start = Clock::now();
  const SuiteRun run = evaluate_synthetic_suite();

  const auto final_accuracy = [&run](Mode mode) {
    return run.reports.at(mode).per_iteration_accuracy.back();
  };
  const double ours_llm = final_accuracy(Mode::OursLlm);
  const double ours_front = final_accuracy(Mode::OursFront);
  const double nap = final_accuracy(Mode::NoActivePerception);
  const double no_questions = final_accuracy(Mode::NoQuestions);

  const bool c4 = ours_llm == 1.0 && nap <= 0.40 && no_questions <= 0.40 &&
                  ours_llm >= ours_front && ours_front >= nap;
  const double elapsed4 = seconds_since(start);
  report(4, "active-perception separation", c4 && elapsed4 < 10.0, elapsed4);
  CHECK(ours_llm == 1.0);
  CHECK(nap <= 0.40);
  CHECK(no_questions <= 0.40);
  CHECK(ours_llm >= ours_front);
  CHECK(ours_front >= nap);
  CHECK(elapsed4 < 10.0);

  const AnswerabilityReport& answers = run.reports.at(Mode::OursLlm).answerability;
  const bool c5 = answers.llm_angle > answers.front &&
                  answers.front > answers.scene &&
                  answers.scene >= 0.32 - 0.05 && answers.scene <= 0.32 + 0.05;
  report(5, "answerability ordering", c5, seconds_since(start));
  CHECK(answers.llm_angle > answers.front);
  CHECK(answers.front > answers.scene);
  CHECK(answers.scene == doctest::Approx(0.32).epsilon(0.16));  // 0.32 +/- 0.05
  // the summary table carries the ordering the report prints
  const std::string table = format_summary_table({run.reports.at(Mode::OursLlm)});
  CHECK(table.find("scene") != std::string::npos);
}

TEST_CASE("criterion 6: tie and omission scoring on a hand-built fixture") {
  const auto start = Clock::now();
  auto question = [](const std::string& object, std::set<char> correct,
                     bool omitted = false) {
    BenchmarkQuestion q;
    q.object = object;
    for (int i = 0; i < 5; ++i)
      q.options.push_back({"state", i == 0 ? "Leave it as is." : "Act."});
    q.correct = std::move(correct);
    q.omitted = omitted;
    return q;
  };
  auto decision = [](const std::string& object, char letter) {
    ObjectDecision d;
    d.object = object;
    d.chosen_option.letter = letter;
    return d;
  };

  const std::vector<BenchmarkQuestion> questions = {
      question("q01", {'a'}),       question("q02", {'b'}),
      question("q03", {'a', 'c'}),  question("q04", {'d'}),
      question("q05", {'a'}, true), question("q06", {'b', 'e'}),
      question("q07", {'e'}),       question("q08", {'c'}),
      question("q09", {'a'}),       question("q10", {'d'})};
  const std::vector<ObjectDecision> decisions = {
      decision("q01", 'a'), decision("q02", 'c'), decision("q03", 'c'),
      decision("q04", 'd'), decision("q05", 'b'), decision("q06", 'b'),
      decision("q07", 'a'), decision("q08", 'c'), decision("q09", 'a'),
      decision("q10", 'e')};

  // by hand: scoreable = 9 (q05 omitted); correct = q01, q03 (tie), q04,
  // q06 (tie), q08, q09 = 6; accuracy = 6/9
  const double accuracy = score(decisions, questions);
  const bool ok = accuracy == doctest::Approx(6.0 / 9.0).epsilon(1e-12);
  report(6, "tie and omission scoring", ok, seconds_since(start));
  CHECK(accuracy == doctest::Approx(6.0 / 9.0).epsilon(1e-12));

  // removing the omitted question does not change the score
  std::vector<BenchmarkQuestion> without_omitted;
  for (const auto& q : questions) {
    if (!q.omitted) without_omitted.push_back(q);
  }
  CHECK(score(decisions, without_omitted) ==
        doctest::Approx(accuracy).epsilon(1e-12));
}

TEST_CASE("criterion 7: the three worked example programs execute correctly") {
  const auto start = Clock::now();
  bool ok = true;

  auto run_example = [&](const char* program_name, const char* world_name) {
    const WorldSpec world = test_support::fixture_world(world_name);
    const dsl::RobotProgram program = dsl::parse_program(
        test_support::read_file(test_support::program_path(program_name)));
    const auto names = world.object_names();
    std::map<std::string, ReceptacleMap> mapping;
    for (const auto& object : world.objects)
      mapping[object.name] = object.receptacles;
    const auto validation = dsl::validate(
        program, std::set<std::string>(names.begin(), names.end()),
        std::set<std::string>(world.receptacles.begin(),
                              world.receptacles.end()),
        mapping);
    REQUIRE(validation.ok);
    WorldState state = initial_state(world);
    dsl::run_program(program, state);
    return state;
  };

  const WorldState art = run_example("example_one", "art_desk");
  ok = ok && art.find("crayons")->location == Location::in_receptacle("art box");
  ok = ok && art.find("notebook")->location == Location::on_surface();
  ok = ok && art.find("eraser")->location == Location::on_surface();

  const WorldState fruit = run_example("example_two", "fruit_counter");
  ok = ok &&
       fruit.find("apple")->location == Location::in_receptacle("trash can");
  ok = ok && fruit.find("orange")->location == Location::on_surface();
  ok = ok && fruit.find("pink plate")->location == Location::on_surface();

  const WorldState play = run_example("example_three", "play_area");
  ok = ok && play.find("toy castle")->location == Location::on_surface();
  ok = ok && play.find("toy castle")->handled;
  ok = ok && play.find("castle parts")->location ==
                 Location::in_receptacle("toy box");
  ok = ok && play.find("figurine")->location == Location::on_surface();
  ok = ok && !play.find("figurine")->handled;
  ok = ok && play.find("cheerios")->location == Location::on_surface();

  report(7, "worked example execution", ok, seconds_since(start));
  CHECK(ok);
}

namespace {

// --- property suite helpers -------------------------------------------------

WorldSpec random_world(std::mt19937& rng, int max_objects) {
  static const std::vector<Angle> kAll = {Angle::Front, Angle::Back,
                                          Angle::Left, Angle::Right,
                                          Angle::Top, Angle::Scene};
  WorldSpec world;
  world.surface = "desk";
  world.receptacles = {"bin", "box"};
  const int n = 1 + static_cast<int>(rng() % max_objects);
  for (int i = 0; i < n; ++i) {
    SimObject object;
    object.name = "obj" + std::to_string(i);
    const int attrs = 1 + static_cast<int>(rng() % 2);
    for (int a = 0; a < attrs; ++a) {
      Attribute attribute;
      attribute.key = "k" + std::to_string(a);
      attribute.phrase = "Is the `" + object.name + "` in state " +
                         std::to_string(a) + "?";
      attribute.truth = rng() % 2 == 0;
      for (Angle angle : kAll) {
        if (rng() % 2 == 0) attribute.visible_from.insert(angle);
      }
      object.attributes.push_back(std::move(attribute));
    }
    object.receptacles = {"bin", "box"};
    world.objects.push_back(std::move(object));
  }
  return world;
}

std::map<std::string, std::string> fixtures_for(const WorldSpec& world,
                                                int iterations,
                                                std::mt19937& rng) {
  std::map<std::string, std::string> fixtures;
  std::string block;
  for (const auto& object : world.objects) {
    block += "-`" + object.name + "`:\n";
    block += "Resulting question (that can be answered by taking a picture "
             "of object): " +
             object.attributes[0].phrase + "\n\n";
    block += "(a) Yes (b) No (c) Cannot answer from image\n\n";
  }
  const char* options[] = {"(a) Top of the object", "(b) Right side of the "
                           "object", "(c) Left side of the object",
                           "(d) Front of the object", "(e) Behind the object"};
  for (int i = 0; i < iterations; ++i) {
    fixtures["question_gen/*/" + std::to_string(i)] = block;
    for (const auto& object : world.objects) {
      fixtures["angle/" + object.name + "/" + std::to_string(i)] =
          options[rng() % 5];
    }
  }
  return fixtures;
}

}  // namespace

TEST_CASE("criterion 8: invariant property suites") {
  const auto start = Clock::now();

  // pipeline: context monotonicity and the i*K entry count
  {
    std::mt19937 rng(1001);
    for (int round = 0; round < 1000; ++round) {
      const WorldSpec world = random_world(rng, 4);
      const int iterations = 1 + static_cast<int>(rng() % 3);
      const ScriptedLlm llm(fixtures_for(world, iterations, rng));
      const OracleVlm vlm(world);
      PipelineConfig config;
      config.mode = rng() % 2 == 0 ? Mode::OursLlm : Mode::NoActivePerception;
      config.iterations = iterations;
      Transcript transcript("2024-01-01T00:00:00Z");
      Pipeline pipeline(world, config, llm, vlm, PromptRegistry::builtin(),
                        transcript);
      Context context = pipeline.initial_context();
      std::vector<ContextEntry> snapshot;
      for (int i = 0; i < iterations; ++i) {
        pipeline.run_iteration(context, i);
        REQUIRE(context.entries.size() ==
                static_cast<size_t>((i + 1) * world.objects.size()));
        for (size_t k = 0; k < snapshot.size(); ++k) {
          REQUIRE(context.entries[k].object == snapshot[k].object);
          REQUIRE(context.entries[k].question == snapshot[k].question);
          REQUIRE(context.entries[k].answer == snapshot[k].answer);
        }
        snapshot = context.entries;
      }
    }
    std::printf("  pipeline properties: 1000 cases\n");
  }

  // dsl: print/parse round trip and the frame property
  {
    std::mt19937 rng(1002);
    WorldSpec world;
    world.surface = "desk";
    world.receptacles = {"bin", "box"};
    for (const char* name : {"cup", "jar", "pen"}) {
      SimObject object;
      object.name = name;
      object.receptacles = {"bin", "box"};
      world.objects.push_back(object);
    }
    const auto names = world.object_names();
    const std::set<std::string> object_set(names.begin(), names.end());
    const std::set<std::string> receptacle_set = {"bin", "box"};
    std::map<std::string, ReceptacleMap> mapping;
    for (const auto& object : world.objects)
      mapping[object.name] = object.receptacles;

    for (int round = 0; round < 1000; ++round) {
      dsl::RobotProgram program;
      const int length = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < length; ++i) {
        switch (rng() % 5) {
          case 0:
            program.statements.push_back(
                {dsl::Func::LeaveAlone, names[rng() % names.size()]});
            break;
          case 1:
            program.statements.push_back(
                {dsl::Func::SetDesignated,
                 world.receptacles[rng() % world.receptacles.size()]});
            break;
          case 2:
            program.statements.push_back(
                {dsl::Func::Relocate, names[rng() % names.size()]});
            break;
          case 3:
            program.statements.push_back(
                {dsl::Func::Cleanup, names[rng() % names.size()]});
            break;
          default:
            program.statements.push_back({dsl::Func::Done, std::nullopt});
            break;
        }
      }

      const dsl::RobotProgram reparsed =
          dsl::parse_program(dsl::print_program(program));
      REQUIRE(reparsed.same_statements(program));

      if (!dsl::validate(program, object_set, receptacle_set, mapping).ok)
        continue;
      std::set<std::string> touched;
      for (const auto& stmt : program.statements) {
        if (stmt.func == dsl::Func::Done) break;
        if (stmt.func != dsl::Func::SetDesignated && stmt.arg.has_value())
          touched.insert(*stmt.arg);
      }
      WorldState state = initial_state(world);
      dsl::run_program(program, state);
      for (const auto& object : state.objects) {
        if (touched.count(object.name) == 0) {
          REQUIRE(object.location == Location::on_surface());
          REQUIRE_FALSE(object.handled);
        }
      }
    }
    std::printf("  dsl properties: 1000 cases\n");
  }

  // world: visibility monotonicity and skill conservation
  {
    std::mt19937 rng(1003);
    for (int round = 0; round < 1000; ++round) {
      const WorldSpec world = random_world(rng, 5);
      const auto names = world.object_names();

      for (const auto& object : world.objects) {
        std::set<std::string> union_keys;
        for (Angle angle : kCloseUpAngles) {
          for (const auto& fact :
               take_photo(world, object.name, angle, 0).facts)
            union_keys.insert(fact.key);
        }
        for (const auto& fact : take_photo(world, "", Angle::Scene, 0).facts) {
          if (fact.object == object.name) union_keys.insert(fact.key);
        }
        for (Angle angle : kCloseUpAngles) {
          for (const auto& fact :
               take_photo(world, object.name, angle, 0).facts)
            REQUIRE(union_keys.count(fact.key) == 1);
        }
      }

      WorldState state = initial_state(world);
      const int skills = static_cast<int>(rng() % 8);
      for (int i = 0; i < skills; ++i) {
        const std::string& object = names[rng() % names.size()];
        const std::string& receptacle =
            world.receptacles[rng() % world.receptacles.size()];
        switch (rng() % 3) {
          case 0:
            execute_skill(state, LeaveAloneSkill{object});
            break;
          case 1:
            execute_skill(state, RelocateSkill{object, receptacle});
            break;
          default:
            execute_skill(state, CleanupSkill{object, receptacle});
            break;
        }
      }
      REQUIRE(state.objects.size() == names.size());
      for (size_t i = 0; i < names.size(); ++i)
        REQUIRE(state.objects[i].name == names[i]);
    }
    std::printf("  world properties: 1000 cases\n");
  }

  // parsing: totality over arbitrary input
  {
    std::mt19937 rng(1004);
    const std::string alphabet =
        "ab`():?.-\n\t \"{}Program:```robot.done();Yes No Cannot answer from "
        "image(a)(b)(c)";
    const std::string valid_block =
        "-`mug`:\nSocially motivated reasoning: r.\n\nResulting question "
        "(that can be answered by taking a picture of object): Is the `mug` "
        "empty?\n\n(a) Yes (b) No (c) Cannot answer from image\n";
    for (int round = 0; round < 1000; ++round) {
      std::string text;
      if (round % 2 == 0) {
        const size_t length = rng() % 200;
        for (size_t i = 0; i < length; ++i)
          text += alphabet[rng() % alphabet.size()];
      } else {
        text = valid_block;
        const int edits = 1 + static_cast<int>(rng() % 6);
        for (int e = 0; e < edits; ++e) {
          if (text.empty()) break;
          const size_t at = rng() % text.size();
          switch (rng() % 3) {
            case 0:
              text.erase(at, 1);
              break;
            case 1:
              text.insert(at, 1, alphabet[rng() % alphabet.size()]);
              break;
            default:
              text[at] = alphabet[rng() % alphabet.size()];
              break;
          }
        }
      }
      try {
        (void)parse_question_block(text, {"mug"});
      } catch (const Error&) {
      }
      try {
        (void)parse_angle_choice(text);
      } catch (const Error&) {
      }
      try {
        (void)parse_choice(text, 5);
      } catch (const Error&) {
      }
      try {
        (void)parse_benchmark_options(text, text, "mug");
      } catch (const Error&) {
      }
      try {
        (void)extract_program(text);
      } catch (const Error&) {
      }
      try {
        (void)dsl::parse_program(text);
      } catch (const Error&) {
      }
    }
    std::printf("  parsing totality: 1000 cases\n");
  }

  const double elapsed = seconds_since(start);
  report(8, "invariant property suites", elapsed < 60.0, elapsed);
  CHECK(elapsed < 60.0);
}
