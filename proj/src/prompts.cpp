#include "tidyloop/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "prompt_assets.hpp"
#include "tidyloop/error.hpp"
#include "tidyloop/world.hpp"

namespace tidyloop {
namespace {

// Joins already-rendered blocks with single blank lines; rendered prompts
// always end with one trailing newline.
std::string compose(const std::vector<std::string>& blocks) {
  std::string text;
  for (const auto& piece : blocks) {
    if (piece.empty()) continue;
    if (!text.empty()) text += "\n\n";
    text += piece;
  }
  text += '\n';
  return text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read template file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void replace_all(std::string& text, const std::string& marker,
                 const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(marker, pos)) != std::string::npos) {
    text.replace(pos, marker.size(), value);
    pos += value.size();
  }
}

}  // namespace

std::string Template::render(
    const std::map<std::string, std::string>& slots) const {
  for (const auto& slot : required_slots) {
    if (slots.find(slot) == slots.end())
      throw Error("template '" + id + "' missing slot '" + slot + "'");
  }
  std::string text = body;
  for (const auto& [name, value] : slots) {
    replace_all(text, "{" + name + "}", value);
  }
  for (const auto& slot : required_slots) {
    if (text.find("{" + slot + "}") != std::string::npos)
      throw Error("template '" + id + "' left an unfilled '{" + slot +
                  "}' marker");
  }
  return text;
}

const PromptRegistry& PromptRegistry::builtin() {
  static const PromptRegistry registry = [] {
    PromptRegistry out;
    out.version_ = assets::kTemplatePackVersion;
    for (const auto& [id, source] : assets::template_sources()) {
      out.templates_.emplace(id, Template{id, source.body, source.slots});
    }
    return out;
  }();
  return registry;
}

PromptRegistry PromptRegistry::with_overrides(const std::string& dir) {
  PromptRegistry registry = builtin();
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("template override directory '" + dir +
                      "' does not exist");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    const std::string id = entry.path().stem().string();
    auto it = registry.templates_.find(id);
    if (it == registry.templates_.end())
      throw ConfigError("template override '" + entry.path().string() +
                        "' does not match any known template id");
    std::string body = read_file(entry.path());
    while (!body.empty() && body.back() == '\n') body.pop_back();
    it->second.body = std::move(body);
  }
  return registry;
}

const Template& PromptRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error("unknown template id '" + id + "'");
  return it->second;
}

std::vector<std::string> PromptRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

std::string format_object_list(const std::vector<std::string>& objects) {
  std::string out;
  for (const auto& name : objects) {
    if (!out.empty()) out += ", ";
    out += "`" + name + "`";
  }
  return out;
}

namespace {

void require_objects(const std::vector<std::string>& objects,
                     const char* what) {
  if (objects.empty())
    throw Error(std::string(what) + " needs a non-empty object list");
}

RenderedPrompt make_prompt(std::string id, std::string text,
                           std::map<std::string, std::string> slots) {
  return RenderedPrompt{std::move(id), std::move(text), std::move(slots)};
}

}  // namespace

RenderedPrompt render_initial_description(
    const PromptRegistry& registry, const std::vector<std::string>& objects) {
  require_objects(objects, "initial description");
  std::map<std::string, std::string> slots{
      {"objects", format_object_list(objects)}};
  return make_prompt(
      "initial_description",
      compose({registry.get("initial_description").render(slots)}), slots);
}

RenderedPrompt render_question_prompt(const PromptRegistry& registry,
                                      const std::vector<std::string>& objects) {
  require_objects(objects, "question prompt");
  std::map<std::string, std::string> slots{
      {"objects", format_object_list(objects)}};
  const std::string text =
      compose({registry.get("question_example").render({}),
               registry.get("question_instruction").render(slots)});
  return make_prompt("question_prompt", text, slots);
}

RenderedPrompt render_baseline_question_prompt(
    const PromptRegistry& registry, const std::vector<std::string>& objects) {
  require_objects(objects, "baseline question prompt");
  std::map<std::string, std::string> slots{
      {"objects", format_object_list(objects)}};
  return make_prompt("baseline_question_prompt",
                     compose({registry.get("baseline_question").render(slots)}),
                     slots);
}

RenderedPrompt render_angle_prompt(const PromptRegistry& registry,
                                   const std::vector<std::string>& objects,
                                   const std::string& question) {
  require_objects(objects, "angle prompt");
  if (question.empty()) throw Error("angle prompt needs a question");
  std::map<std::string, std::string> slots{
      {"objects", format_object_list(objects)}, {"question", question}};
  const std::string text = compose({registry.get("angle_examples").render({}),
                                    registry.get("angle_query").render(slots)});
  return make_prompt("angle_prompt", text, slots);
}

RenderedPrompt render_action_prompt(
    const PromptRegistry& registry, const Context& context,
    const BenchmarkQuestion& question,
    const std::optional<std::string>& preference) {
  question.check();
  std::vector<std::string> blocks;
  const auto entries = context.entries_for(question.object);
  if (entries.empty()) {
    // Nothing gathered yet (open-loop mode): lead with the object listing.
    blocks.push_back(context.initial_description);
  } else {
    blocks.push_back(registry.get("action_context_header")
                         .render({{"object", question.object}}));
    std::string qa;
    for (const auto& entry : entries) {
      if (!qa.empty()) qa += '\n';
      qa += entry.question + " " + entry.answer;
    }
    blocks.push_back(qa);
  }

  std::string options_block =
      registry.get("action_question").render({{"object", question.object}});
  char letter = 'a';
  for (const auto& option : question.options) {
    options_block += "\n(" + std::string(1, letter) + ") " + option.state +
                     " -> " + option.action;
    ++letter;
  }
  blocks.push_back(std::move(options_block));

  std::map<std::string, std::string> slots{{"object", question.object}};
  if (preference.has_value()) {
    slots["preference"] = *preference;
    blocks.push_back(registry.get("preference_suffix")
                         .render({{"object", question.object},
                                  {"preference", *preference}}));
  }
  blocks.push_back(registry.get("action_footer").render({}));
  return make_prompt("action_prompt", compose(blocks), slots);
}

RenderedPrompt render_codegen_prompt(
    const PromptRegistry& registry, const std::string& instruction,
    const std::vector<std::string>& objects,
    const std::map<std::string, ReceptacleMap>& receptacle_map) {
  require_objects(objects, "codegen prompt");
  if (instruction.empty()) throw Error("codegen prompt needs an instruction");

  std::string objects_json = "[";
  for (size_t i = 0; i < objects.size(); ++i) {
    if (i > 0) objects_json += ", ";
    objects_json += "\"" + objects[i] + "\"";
  }
  objects_json += "]";

  std::string receptacles_json = "{";
  bool first = true;
  for (const auto& name : objects) {
    auto it = receptacle_map.find(name);
    if (it == receptacle_map.end())
      throw ReferenceError("object '" + name +
                           "' is missing from the receptacle map");
    if (!first) receptacles_json += ",";
    receptacles_json += "\n  \"" + name + "\": {\"relocate\": \"" +
                        it->second.relocate + "\", \"cleanup\": \"" +
                        it->second.cleanup + "\"}";
    first = false;
  }
  receptacles_json += "\n}";

  std::map<std::string, std::string> slots{
      {"instruction", "\"" + instruction + "\""},
      {"objects", objects_json},
      {"receptacles", receptacles_json}};
  const std::string text =
      compose({registry.get("codegen_api").render({}),
               registry.get("codegen_icl_instruction").render({}),
               registry.get("codegen_example_one").render({}),
               registry.get("codegen_example_two").render({}),
               registry.get("codegen_example_three").render({}),
               registry.get("codegen_continuation").render(slots)});
  return make_prompt("codegen_prompt", text, slots);
}

std::pair<RenderedPrompt, RenderedPrompt> render_benchmark_gen_prompts(
    const PromptRegistry& registry, const std::vector<std::string>& objects) {
  require_objects(objects, "benchmark generation prompts");
  std::map<std::string, std::string> slots{
      {"objects", format_object_list(objects)}};
  RenderedPrompt stage1 =
      make_prompt("benchmark_q1",
                  compose({registry.get("benchmark_q1").render(slots)}), slots);
  RenderedPrompt stage2 = make_prompt(
      "benchmark_q2", compose({registry.get("benchmark_q2").render({})}), {});
  return {std::move(stage1), std::move(stage2)};
}

RenderedPrompt render_vqa_prompt(const PromptRegistry& registry,
                                 const std::string& question) {
  if (question.empty()) throw Error("vqa prompt needs a question");
  std::map<std::string, std::string> slots{{"question", question}};
  return make_prompt("vqa_prompt",
                     compose({registry.get("vqa").render(slots)}), slots);
}

}  // namespace tidyloop
