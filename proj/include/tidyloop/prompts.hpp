#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tidyloop/benchmark.hpp"
#include "tidyloop/context.hpp"

namespace tidyloop {

struct ReceptacleMap;

// A parameterized prompt template. Slots appear in the body as {name};
// rendering replaces every occurrence and rejects missing slots.
struct Template {
  std::string id;
  std::string body;
  std::set<std::string> required_slots;

  std::string render(const std::map<std::string, std::string>& slots) const;
};

struct RenderedPrompt {
  std::string template_id;
  std::string text;
  std::map<std::string, std::string> slot_values;
};

// Immutable once constructed; safe for concurrent rendering.
class PromptRegistry {
 public:
  // The compiled-in template pack.
  static const PromptRegistry& builtin();

  // Copy of the builtin pack with bodies overridden by <id>.txt files found
  // in `dir`. Unknown ids are an error.
  static PromptRegistry with_overrides(const std::string& dir);

  const Template& get(const std::string& id) const;
  std::vector<std::string> ids() const;
  int version() const { return version_; }

 private:
  PromptRegistry() = default;
  std::map<std::string, Template> templates_;
  int version_ = 0;
};

// "`a`, `b`, `c`": the backticked, comma-separated listing every prompt uses.
std::string format_object_list(const std::vector<std::string>& objects);

// "These are the objects on the desk: `a`, `b`.", the scene description the
// whole context starts from.
RenderedPrompt render_initial_description(const PromptRegistry& registry,
                                          const std::vector<std::string>& objects);

// One-shot example followed by the live instruction block.
RenderedPrompt render_question_prompt(const PromptRegistry& registry,
                                      const std::vector<std::string>& objects);

// The factual-question variant: no tidying goal, no reasoning requirement.
RenderedPrompt render_baseline_question_prompt(
    const PromptRegistry& registry, const std::vector<std::string>& objects);

// Three fixed angle-selection examples, then the live query for `question`.
RenderedPrompt render_angle_prompt(const PromptRegistry& registry,
                                   const std::vector<std::string>& objects,
                                   const std::string& question);

// Q&A context block for the question's object (or the object listing when no
// entries exist yet), the five options, an optional owner-preference
// paragraph, and the final answer cue.
RenderedPrompt render_action_prompt(const PromptRegistry& registry,
                                    const Context& context,
                                    const BenchmarkQuestion& question,
                                    const std::optional<std::string>& preference);

// Full code-generation prompt: API definition, docs, three worked examples,
// and the continuation block for `instruction`.
RenderedPrompt render_codegen_prompt(
    const PromptRegistry& registry, const std::string& instruction,
    const std::vector<std::string>& objects,
    const std::map<std::string, ReceptacleMap>& receptacle_map);

// Stage-1 state elicitation and stage-2 action elicitation.
std::pair<RenderedPrompt, RenderedPrompt> render_benchmark_gen_prompts(
    const PromptRegistry& registry, const std::vector<std::string>& objects);

RenderedPrompt render_vqa_prompt(const PromptRegistry& registry,
                                 const std::string& question);

}  // namespace tidyloop
