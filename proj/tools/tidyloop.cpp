#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tidyloop/bench.hpp"
#include "tidyloop/clients.hpp"
#include "tidyloop/dsl.hpp"
#include "tidyloop/error.hpp"
#include "tidyloop/pipeline.hpp"
#include "tidyloop/suitegen.hpp"

namespace fs = std::filesystem;
using namespace tidyloop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitDomain = 2;
constexpr int kExitUsage = 64;

struct CommonOptions {
  std::string fixtures;
  std::string out;
  std::string pin_timestamp;
  std::string templates;
  std::string llm = "scripted";
  std::string vlm = "oracle";
};

std::string pinned_timestamp(const CommonOptions& options) {
  if (!options.pin_timestamp.empty()) return options.pin_timestamp;
  const char* env = std::getenv("TIDYLOOP_PIN_TIMESTAMP");
  return env == nullptr ? "" : env;
}

PromptRegistry load_registry(const CommonOptions& options) {
  if (options.templates.empty()) return PromptRegistry::builtin();
  return PromptRegistry::with_overrides(options.templates);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

std::string read_source(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open program file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::map<std::string, std::string> parse_preferences(
    const std::vector<std::string>& raw) {
  std::map<std::string, std::string> preferences;
  for (const auto& entry : raw) {
    const size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("preference '" + entry + "' must look like object=text");
    preferences[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return preferences;
}

void print_validation(const dsl::ValidationReport& report, std::ostream& out) {
  out << (report.ok ? "ok" : "invalid") << "\n";
  for (const auto& violation : report.violations) {
    out << "  violation " << violation.rule << " at statement "
        << violation.statement << ": " << violation.message << "\n";
  }
  for (const auto& warning : report.warnings) {
    out << "  warning " << warning.rule << " at statement "
        << warning.statement << ": " << warning.message << "\n";
  }
}

int cmd_run(const std::string& world_path, const std::string& mode_name,
            int iterations, const std::vector<std::string>& raw_preferences,
            const CommonOptions& options) {
  const WorldSpec world = load_world(world_path);
  PipelineConfig config;
  config.mode = mode_from_string(mode_name);
  config.iterations = iterations;
  config.preference_map = parse_preferences(raw_preferences);

  const PromptRegistry registry = load_registry(options);
  const auto llm =
      make_llm_backend(options.llm, options.fixtures, to_string(config.mode));
  const auto vlm = make_vlm_backend(options.vlm, options.fixtures, &world);

  Transcript transcript(pinned_timestamp(options));
  const PipelineResult result =
      run_pipeline(world, config, *llm, *vlm, registry, transcript);

  nlohmann::ordered_json decisions_doc;
  decisions_doc["surface"] = world.surface;
  decisions_doc["mode"] = to_string(config.normalized().mode);
  decisions_doc["iterations"] = config.normalized().iterations;
  auto decisions = nlohmann::ordered_json::array();
  for (const auto& decision : result.decisions)
    decisions.push_back(to_json(decision));
  decisions_doc["decisions"] = std::move(decisions);
  auto programs = nlohmann::ordered_json::array();
  for (const auto& outcome : result.programs) programs.push_back(to_json(outcome));
  decisions_doc["programs"] = std::move(programs);

  nlohmann::ordered_json state_doc = to_json(result.final_state);
  state_doc["surface"] = world.surface;

  const fs::path out_dir(options.out);
  write_file(out_dir / "transcript.jsonl", transcript.to_jsonl());
  write_file(out_dir / "decisions.json", decisions_doc.dump(2) + "\n");
  write_file(out_dir / "world_state.json", state_doc.dump(2) + "\n");

  bool all_valid = true;
  for (const auto& outcome : result.programs) {
    if (!outcome.report.ok) {
      all_valid = false;
      std::cerr << "program for '" << outcome.object << "' skipped: ";
      if (!outcome.error.empty()) std::cerr << outcome.error;
      print_validation(outcome.report, std::cerr);
    }
  }
  std::cout << "wrote " << (out_dir / "transcript.jsonl").string() << ", "
            << (out_dir / "decisions.json").string() << ", "
            << (out_dir / "world_state.json").string() << "\n";
  return all_valid ? kExitOk : kExitDomain;
}

EvalReport aggregate_reports(const std::vector<EvalReport>& reports) {
  if (reports.size() == 1) return reports.front();
  EvalReport total = reports.front();
  double weight_sum = 0.0;
  double answer_weight_sum = 0.0;
  std::vector<double> accuracy(total.per_iteration_accuracy.size(), 0.0);
  AnswerabilityReport answers;
  int n_questions = 0;
  for (const auto& report : reports) {
    if (report.per_iteration_accuracy.size() != accuracy.size())
      throw Error("manifest reports disagree on iteration count");
    const double w = report.n_questions;
    weight_sum += w;
    n_questions += report.n_questions;
    for (size_t i = 0; i < accuracy.size(); ++i)
      accuracy[i] += report.per_iteration_accuracy[i] * w;
    const double aw = report.answerability.n_questions;
    answer_weight_sum += aw;
    answers.scene += report.answerability.scene * aw;
    answers.non_front += report.answerability.non_front * aw;
    answers.front += report.answerability.front * aw;
    answers.non_llm += report.answerability.non_llm * aw;
    answers.llm_angle += report.answerability.llm_angle * aw;
    answers.n_questions += report.answerability.n_questions;
  }
  for (auto& value : accuracy) value /= weight_sum == 0.0 ? 1.0 : weight_sum;
  if (answer_weight_sum > 0.0) {
    answers.scene /= answer_weight_sum;
    answers.non_front /= answer_weight_sum;
    answers.front /= answer_weight_sum;
    answers.non_llm /= answer_weight_sum;
    answers.llm_angle /= answer_weight_sum;
  }
  total.per_iteration_accuracy = std::move(accuracy);
  total.answerability = answers;
  total.n_questions = n_questions;
  return total;
}

int cmd_eval(const std::string& manifests_dir, const std::string& modes_arg,
             int iterations, const CommonOptions& options) {
  std::vector<fs::path> manifests;
  if (!fs::is_directory(manifests_dir))
    throw ConfigError("manifest directory '" + manifests_dir +
                      "' does not exist");
  for (const auto& entry : fs::directory_iterator(manifests_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());
  if (manifests.empty())
    throw ConfigError("manifest directory '" + manifests_dir +
                      "' contains no .json manifests");

  std::vector<Mode> modes;
  if (modes_arg.empty() || modes_arg == "all") {
    modes = all_modes();
  } else {
    std::stringstream in(modes_arg);
    std::string name;
    while (std::getline(in, name, ',')) modes.push_back(mode_from_string(name));
  }

  const PromptRegistry registry = load_registry(options);
  const fs::path out_dir(options.out);
  std::vector<EvalReport> summary;
  for (Mode mode : modes) {
    std::vector<EvalReport> reports;
    for (const auto& manifest : manifests) {
      const WorldSpec world = load_world(manifest.string());
      PipelineConfig config;
      config.mode = mode;
      config.iterations = iterations;
      const auto llm =
          make_llm_backend(options.llm, options.fixtures, to_string(mode));
      const auto vlm = make_vlm_backend(options.vlm, options.fixtures, &world);
      Transcript transcript(pinned_timestamp(options));
      reports.push_back(
          evaluate_mode(world, config, *llm, *vlm, registry, transcript));
    }
    const EvalReport report = aggregate_reports(reports);
    write_file(out_dir / ("eval_" + to_string(mode) + ".json"),
               to_json(report).dump(2) + "\n");
    write_file(out_dir / ("eval_" + to_string(mode) + ".txt"),
               format_report_table(report));
    summary.push_back(report);
  }

  auto summary_json = nlohmann::ordered_json::array();
  for (const auto& report : summary) summary_json.push_back(to_json(report));
  write_file(out_dir / "summary.json", summary_json.dump(2) + "\n");
  const std::string table = format_summary_table(summary);
  write_file(out_dir / "summary.txt", table);
  std::cout << table;
  return kExitOk;
}

int cmd_validate_program(const std::string& path, const std::string& world_path,
                         std::ostream& out) {
  dsl::RobotProgram program;
  try {
    program = dsl::parse_program(read_source(path));
  } catch (const ParseError& ex) {
    out << "parse error: " << ex.what() << "\n";
    return kExitDomain;
  }
  dsl::ValidationReport report;
  if (world_path.empty()) {
    report = dsl::validate(program);
  } else {
    const WorldSpec world = load_world(world_path);
    const auto names = world.object_names();
    std::map<std::string, ReceptacleMap> mapping;
    for (const auto& object : world.objects)
      mapping[object.name] = object.receptacles;
    report = dsl::validate(
        program, std::set<std::string>(names.begin(), names.end()),
        std::set<std::string>(world.receptacles.begin(),
                              world.receptacles.end()),
        mapping);
  }
  print_validation(report, out);
  return report.ok ? kExitOk : kExitDomain;
}

int cmd_exec_program(const std::string& path, const std::string& world_path,
                     std::ostream& out) {
  const WorldSpec world = load_world(world_path);
  dsl::RobotProgram program;
  try {
    program = dsl::parse_program(read_source(path));
  } catch (const ParseError& ex) {
    out << "parse error: " << ex.what() << "\n";
    return kExitDomain;
  }
  const auto names = world.object_names();
  std::map<std::string, ReceptacleMap> mapping;
  for (const auto& object : world.objects)
    mapping[object.name] = object.receptacles;
  const dsl::ValidationReport report = dsl::validate(
      program, std::set<std::string>(names.begin(), names.end()),
      std::set<std::string>(world.receptacles.begin(), world.receptacles.end()),
      mapping);
  print_validation(report, out);
  if (!report.ok) return kExitDomain;

  WorldState state = initial_state(world);
  const dsl::ExecutionTrace trace = dsl::run_program(program, state);
  for (const auto& event : trace.events) out << dsl::to_json(event).dump() << "\n";
  out << "final locations:\n";
  for (const auto& object : state.objects) {
    out << "  " << object.name << ": " << object.location.to_string()
        << (object.handled ? " (handled)" : "") << "\n";
  }
  return kExitOk;
}

int cmd_gen_suite(const std::string& out_dir, int objects, unsigned seed,
                  int iterations) {
  SuiteParams params;
  params.n_objects = objects;
  params.seed = seed;
  params.iterations = iterations;
  const SyntheticSuite suite = make_synthetic_suite(params);
  write_synthetic_suite(suite, out_dir);
  std::cout << "wrote synthetic suite (" << objects << " objects, "
            << suite.scene_visible_count << " scene-visible, "
            << suite.front_visible_count << " front-visible) under " << out_dir
            << "\n";
  return kExitOk;
}

int cmd_gen_benchmark(const std::string& world_path, const std::string& out_file,
                      const CommonOptions& options) {
  WorldSpec world = load_world(world_path);
  const PromptRegistry registry = load_registry(options);
  const auto llm = make_llm_backend(options.llm, options.fixtures, "");
  Transcript transcript(pinned_timestamp(options));
  world.benchmark = generate_benchmark(world, *llm, registry, transcript);
  write_file(out_file, to_json(world).dump(2) + "\n");
  std::cout << "wrote " << out_file << " with " << world.benchmark.size()
            << " benchmark questions\n";
  return kExitOk;
}

int cmd_record_fixtures(const std::string& transcript_path,
                        const std::string& out_dir) {
  std::ifstream in(transcript_path);
  if (!in) throw Error("cannot open transcript '" + transcript_path + "'");
  nlohmann::ordered_json llm = nlohmann::ordered_json::object();
  nlohmann::ordered_json vlm = nlohmann::ordered_json::object();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto event = nlohmann::json::parse(line);
    const std::string kind = event.at("kind").get<std::string>();
    const auto& payload = event.at("payload");
    if (kind == "completion") {
      const std::string key = payload.at("role").get<std::string>() + "/" +
                              payload.at("object").get<std::string>() + "/" +
                              std::to_string(payload.at("iteration").get<int>());
      llm[key] = payload.at("text").get<std::string>();
    } else if (kind == "vqa") {
      const std::string key = payload.at("target").get<std::string>() + "|" +
                              payload.at("angle").get<std::string>() + "|" +
                              payload.at("question").get<std::string>();
      std::string answer = payload.at("answer").get<std::string>();
      for (auto& c : answer) c = static_cast<char>(std::tolower(c));
      vlm[key] = answer;
    }
  }
  write_file(fs::path(out_dir) / "llm.json", llm.dump(2) + "\n");
  write_file(fs::path(out_dir) / "vlm.json", vlm.dump(2) + "\n");
  std::cout << "wrote replay fixtures under " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grounded tidying loop: simulated active perception, robot-DSL "
               "execution, and benchmark evaluation"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string world_path;
  std::string mode_name = "ours_llm";
  int iterations = 5;
  std::vector<std::string> preferences;

  auto add_common = [&common](CLI::App* cmd, bool with_vlm = true) {
    cmd->add_option("--fixtures", common.fixtures,
                    "directory with scripted backend fixtures");
    cmd->add_option("--out", common.out, "output directory")->required();
    cmd->add_option("--pin-timestamp", common.pin_timestamp,
                    "fixed RFC3339 timestamp for transcript events");
    cmd->add_option("--templates", common.templates,
                    "prompt template override directory");
    cmd->add_option("--llm", common.llm, "LLM backend: scripted|http")
        ->check(CLI::IsMember({"scripted", "http"}));
    if (with_vlm) {
      cmd->add_option("--vlm", common.vlm,
                      "VLM backend: scripted|http|oracle|human")
          ->check(CLI::IsMember({"scripted", "http", "oracle", "human"}));
    }
  };

  CLI::App* run = app.add_subcommand("run", "run the full loop on one world");
  run->add_option("--world", world_path, "world spec JSON")->required();
  run->add_option("--mode", mode_name,
                  "ours_llm|ours_front|baseline_questions|"
                  "no_active_perception|no_questions");
  run->add_option("--iterations", iterations, "question/answer rounds");
  run->add_option("--preference", preferences,
                  "owner preference as object=text (repeatable)");
  add_common(run);

  std::string manifests_dir;
  std::string modes_arg = "all";
  CLI::App* eval =
      app.add_subcommand("eval", "evaluate modes over a manifest directory");
  eval->add_option("--manifests", manifests_dir, "directory of world manifests")
      ->required();
  eval->add_option("--modes", modes_arg, "comma-separated mode list or 'all'");
  eval->add_option("--iterations", iterations, "question/answer rounds");
  add_common(eval);

  std::string program_path;
  std::string program_world;
  CLI::App* validate = app.add_subcommand(
      "validate-program", "check a robot program ('-' reads stdin)");
  validate->add_option("program", program_path, "program file")->required();
  validate->add_option("--world", program_world,
                       "world spec for object/receptacle checks");

  CLI::App* exec = app.add_subcommand(
      "exec-program", "validate and execute a robot program against a world");
  exec->add_option("program", program_path, "program file")->required();
  exec->add_option("--world", program_world, "world spec JSON")->required();

  std::string suite_out;
  int suite_objects = 20;
  unsigned suite_seed = 7;
  int suite_iterations = 5;
  CLI::App* gen_suite = app.add_subcommand(
      "gen-suite", "generate a synthetic occlusion suite with fixtures");
  gen_suite->add_option("--out", suite_out, "output directory")->required();
  gen_suite->add_option("--objects", suite_objects, "object count");
  gen_suite->add_option("--seed", suite_seed, "layout seed");
  gen_suite->add_option("--iterations", suite_iterations, "fixture rounds");

  std::string bench_out;
  CLI::App* gen_benchmark = app.add_subcommand(
      "gen-benchmark", "generate benchmark options for a world via the LLM");
  gen_benchmark->add_option("--world", world_path, "world spec JSON")
      ->required();
  gen_benchmark->add_option("--out", bench_out, "output manifest file")
      ->required();
  gen_benchmark->add_option("--fixtures", common.fixtures,
                            "directory with scripted backend fixtures");
  gen_benchmark->add_option("--llm", common.llm, "LLM backend: scripted|http")
      ->check(CLI::IsMember({"scripted", "http"}));
  gen_benchmark->add_option("--templates", common.templates,
                            "prompt template override directory");

  std::string transcript_path;
  std::string fixtures_out;
  CLI::App* record = app.add_subcommand(
      "record-fixtures", "turn a transcript into scripted replay fixtures");
  record->add_option("--transcript", transcript_path, "transcript JSONL")
      ->required();
  record->add_option("--out", fixtures_out, "fixture output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed())
      return cmd_run(world_path, mode_name, iterations, preferences, common);
    if (eval->parsed())
      return cmd_eval(manifests_dir, modes_arg, iterations, common);
    if (validate->parsed())
      return cmd_validate_program(program_path, program_world, std::cout);
    if (exec->parsed())
      return cmd_exec_program(program_path, program_world, std::cout);
    if (gen_suite->parsed())
      return cmd_gen_suite(suite_out, suite_objects, suite_seed,
                           suite_iterations);
    if (gen_benchmark->parsed())
      return cmd_gen_benchmark(world_path, bench_out, common);
    if (record->parsed())
      return cmd_record_fixtures(transcript_path, fixtures_out);
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& ex) {
    std::cerr << "internal error: " << ex.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
