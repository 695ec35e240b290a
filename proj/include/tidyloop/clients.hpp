#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "tidyloop/prompts.hpp"
#include "tidyloop/world.hpp"

namespace tidyloop {

// Stable lookup key for scripted completions: which role the call plays in
// the loop, which object it concerns ("*" for whole-iteration calls), and
// the iteration number.
struct ScriptKey {
  std::string role;
  std::string object;
  int iteration = 0;

  std::string str() const {
    return role + "/" + object + "/" + std::to_string(iteration);
  }
};

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string model_tag;
  std::optional<ScriptKey> script_key;  // consumed by the scripted backend
};

enum class VqaAnswer { Yes, No, Unknown };

std::string to_string(VqaAnswer answer);

struct VqaRequest {
  ImageRef image;
  std::string question;
};

// All backends are safe for concurrent requests.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string kind() const = 0;

  // Validates the request, then defers to the backend.
  std::string complete(const CompletionRequest& request) const;

 private:
  virtual std::string do_complete(const CompletionRequest& request) const = 0;
};

class VlmBackend {
 public:
  virtual ~VlmBackend() = default;
  virtual std::string kind() const = 0;

  VqaAnswer answer(const VqaRequest& request) const;

 private:
  virtual VqaAnswer do_answer(const VqaRequest& request) const = 0;
};

// Deterministic fixture map. Throws FixtureError for a missing key and Error
// for requests without a script key. Lookups never mutate anything.
class ScriptedLlm : public LlmBackend {
 public:
  explicit ScriptedLlm(std::map<std::string, std::string> fixtures);

  // Reads llm.json from `dir`, then overlays llm.<mode>.json when present.
  static ScriptedLlm load(const std::string& dir, const std::string& mode);

  std::string kind() const override { return "scripted"; }

 private:
  std::string do_complete(const CompletionRequest& request) const override;
  std::map<std::string, std::string> fixtures_;
};

struct HttpConfig {
  std::string api_base;
  std::string api_key;
  std::string model;
  int max_retries = 2;
  int backoff_ms = 100;

  // Reads <PREFIX>_API_BASE, <PREFIX>_API_KEY, <PREFIX>_MODEL; the key is
  // required, the others have OpenAI-flavored defaults. Throws ConfigError
  // naming the missing variable.
  static HttpConfig from_env(const std::string& prefix);
};

// POSTs an OpenAI-compatible chat-completions request and returns the first
// choice's message content. Transport failures and non-2xx statuses are
// retried `max_retries` times with exponential backoff, then raised as
// TransportError.
std::string chat_complete(const HttpConfig& config, const std::string& prompt,
                          double temperature, int max_tokens);

class HttpLlm : public LlmBackend {
 public:
  explicit HttpLlm(HttpConfig config) : config_(std::move(config)) {}
  std::string kind() const override { return "http"; }

 private:
  std::string do_complete(const CompletionRequest& request) const override;
  HttpConfig config_;
};

class ScriptedVlm : public VlmBackend {
 public:
  explicit ScriptedVlm(std::map<std::string, std::string> fixtures);
  static ScriptedVlm load(const std::string& dir);

  // "<target>|<ANGLE>|<question>"; the whole-surface target is "scene".
  static std::string fixture_key(const VqaRequest& request);

  std::string kind() const override { return "scripted"; }

 private:
  VqaAnswer do_answer(const VqaRequest& request) const override;
  std::map<std::string, std::string> fixtures_;
};

// Answers from ground truth: YES/NO per the attribute's recorded truth when
// the photographed angle reveals it, UNKNOWN otherwise. The question text
// must match one of the target's canonical attribute phrases.
class OracleVlm : public VlmBackend {
 public:
  explicit OracleVlm(const WorldSpec& world) : world_(&world) {}
  std::string kind() const override { return "oracle"; }

 private:
  VqaAnswer do_answer(const VqaRequest& request) const override;
  const WorldSpec* world_;
};

// Interactive stand-in for a perfect VLM: prints the question plus the fact
// set visible in the image and reads y/n/u from the input stream. Requests
// are serialized internally.
class HumanVlm : public VlmBackend {
 public:
  HumanVlm(const WorldSpec& world, std::istream& in, std::ostream& out)
      : world_(&world), in_(&in), out_(&out) {}
  std::string kind() const override { return "human"; }

 private:
  VqaAnswer do_answer(const VqaRequest& request) const override;
  const WorldSpec* world_;
  std::istream* in_;
  std::ostream* out_;
  mutable std::mutex mutex_;
};

// Sends the VQA prompt as a constrained single-word-choice chat request and
// maps the first yes/no/unknown keyword in the reply.
class HttpVlm : public VlmBackend {
 public:
  explicit HttpVlm(HttpConfig config,
                   const PromptRegistry& registry = PromptRegistry::builtin())
      : config_(std::move(config)), registry_(&registry) {}
  std::string kind() const override { return "http"; }

 private:
  VqaAnswer do_answer(const VqaRequest& request) const override;
  HttpConfig config_;
  const PromptRegistry* registry_;
};

std::unique_ptr<LlmBackend> make_llm_backend(const std::string& kind,
                                             const std::string& fixture_dir,
                                             const std::string& mode);
std::unique_ptr<VlmBackend> make_vlm_backend(const std::string& kind,
                                             const std::string& fixture_dir,
                                             const WorldSpec* world);

}  // namespace tidyloop
