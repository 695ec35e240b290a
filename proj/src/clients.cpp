#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "tidyloop/clients.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "json.hpp"
#include "tidyloop/error.hpp"

namespace tidyloop {
namespace {

using nlohmann::json;

std::map<std::string, std::string> load_fixture_map(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ParseError("fixture file '" + path.string() + "': " + ex.what());
  }
  if (!doc.is_object())
    throw ParseError("fixture file '" + path.string() +
                     "' must be a JSON object");
  std::map<std::string, std::string> fixtures;
  for (const auto& [key, value] : doc.items()) {
    fixtures[key] = value.get<std::string>();
  }
  return fixtures;
}

std::string to_lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return text;
}

// Splits "http://host:port/prefix" into the client base and the path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base) {
  const size_t scheme = base.find("://");
  if (scheme == std::string::npos)
    throw ConfigError("API base '" + base + "' needs a scheme");
  const size_t path = base.find('/', scheme + 3);
  if (path == std::string::npos) return {base, ""};
  std::string prefix = base.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base.substr(0, path), prefix};
}

}  // namespace

std::string to_string(VqaAnswer answer) {
  switch (answer) {
    case VqaAnswer::Yes:
      return "Yes";
    case VqaAnswer::No:
      return "No";
    case VqaAnswer::Unknown:
      return "Unknown";
  }
  throw Error("invalid VqaAnswer value");
}

std::string LlmBackend::complete(const CompletionRequest& request) const {
  if (request.prompt.empty()) throw Error("completion request has empty prompt");
  if (request.temperature < 0.0)
    throw Error("completion request has negative temperature");
  if (request.max_tokens <= 0)
    throw Error("completion request needs positive max_tokens");
  return do_complete(request);
}

VqaAnswer VlmBackend::answer(const VqaRequest& request) const {
  if (request.question.empty()) throw Error("vqa request has empty question");
  return do_answer(request);
}

ScriptedLlm::ScriptedLlm(std::map<std::string, std::string> fixtures)
    : fixtures_(std::move(fixtures)) {}

ScriptedLlm ScriptedLlm::load(const std::string& dir, const std::string& mode) {
  const std::filesystem::path base = std::filesystem::path(dir) / "llm.json";
  auto fixtures = load_fixture_map(base);
  if (!mode.empty()) {
    const std::filesystem::path overlay =
        std::filesystem::path(dir) / ("llm." + mode + ".json");
    if (std::filesystem::exists(overlay)) {
      for (auto& [key, value] : load_fixture_map(overlay)) {
        fixtures[key] = std::move(value);
      }
    }
  }
  return ScriptedLlm(std::move(fixtures));
}

std::string ScriptedLlm::do_complete(const CompletionRequest& request) const {
  if (!request.script_key.has_value())
    throw Error("scripted LLM needs a script key on the request");
  const std::string key = request.script_key->str();
  auto it = fixtures_.find(key);
  if (it == fixtures_.end())
    throw FixtureError("no LLM fixture for key '" + key + "'");
  return it->second;
}

HttpConfig HttpConfig::from_env(const std::string& prefix) {
  HttpConfig config;
  auto read = [&prefix](const char* suffix) -> std::optional<std::string> {
    const std::string name = prefix + suffix;
    const char* value = std::getenv(name.c_str());
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
  };
  const auto key = read("_API_KEY");
  if (!key.has_value())
    throw ConfigError("environment variable " + prefix +
                      "_API_KEY is not set");
  config.api_key = *key;
  config.api_base = read("_API_BASE").value_or("https://api.openai.com/v1");
  config.model = read("_MODEL").value_or("gpt-4");
  return config;
}

std::string chat_complete(const HttpConfig& config, const std::string& prompt,
                          double temperature, int max_tokens) {
  const auto [host, prefix] = split_base_url(config.api_base);
  json body;
  body["model"] = config.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = temperature;
  body["max_tokens"] = max_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config.api_key);

  std::string last_failure;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
    }
    httplib::Client client(host);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    auto result = client.Post(prefix + "/chat/completions", headers, payload,
                              "application/json");
    if (!result) {
      last_failure = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_failure = "HTTP " + std::to_string(result->status) + ": " +
                     result->body.substr(0, 512);
      continue;
    }
    try {
      const json response = json::parse(result->body);
      return response.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const json::exception& ex) {
      throw TransportError(std::string("malformed chat completion response: ") +
                           ex.what());
    }
  }
  throw TransportError("chat completion failed after " +
                       std::to_string(config.max_retries + 1) + " attempts (" +
                       last_failure + ")");
}

std::string HttpLlm::do_complete(const CompletionRequest& request) const {
  HttpConfig config = config_;
  if (!request.model_tag.empty()) config.model = request.model_tag;
  return chat_complete(config, request.prompt, request.temperature,
                       request.max_tokens);
}

ScriptedVlm::ScriptedVlm(std::map<std::string, std::string> fixtures)
    : fixtures_(std::move(fixtures)) {}

ScriptedVlm ScriptedVlm::load(const std::string& dir) {
  return ScriptedVlm(
      load_fixture_map(std::filesystem::path(dir) / "vlm.json"));
}

std::string ScriptedVlm::fixture_key(const VqaRequest& request) {
  const std::string target =
      request.image.is_scene() ? "scene" : request.image.target;
  return target + "|" + to_string(request.image.angle) + "|" + request.question;
}

VqaAnswer ScriptedVlm::do_answer(const VqaRequest& request) const {
  auto it = fixtures_.find(fixture_key(request));
  if (it == fixtures_.end())
    throw FixtureError("no VLM fixture for key '" + fixture_key(request) + "'");
  const std::string value = to_lower(it->second);
  if (value == "yes") return VqaAnswer::Yes;
  if (value == "no") return VqaAnswer::No;
  if (value == "unknown") return VqaAnswer::Unknown;
  throw ParseError("VLM fixture value '" + it->second +
                   "' is not yes/no/unknown");
}

namespace {

// Resolves the attribute a question refers to. For close-up images only the
// target object's phrases are searched; the scene image searches them all.
const Attribute* match_phrase(const WorldSpec& world, const VqaRequest& request) {
  auto search = [&request](const SimObject& object) -> const Attribute* {
    for (const auto& attribute : object.attributes) {
      if (attribute.phrase == request.question) return &attribute;
    }
    return nullptr;
  };
  if (request.image.is_scene()) {
    for (const auto& object : world.objects) {
      if (const Attribute* attribute = search(object)) return attribute;
    }
    return nullptr;
  }
  const SimObject* object = world.find_object(request.image.target);
  if (object == nullptr)
    throw ReferenceError("unknown object '" + request.image.target + "'");
  return search(*object);
}

}  // namespace

VqaAnswer OracleVlm::do_answer(const VqaRequest& request) const {
  const Attribute* attribute = match_phrase(*world_, request);
  if (attribute == nullptr)
    throw ReferenceError("question '" + request.question +
                         "' matches no attribute phrase of '" +
                         (request.image.is_scene() ? std::string("the scene")
                                                   : request.image.target) +
                         "'");
  if (attribute->visible_from.count(request.image.angle) == 0)
    return VqaAnswer::Unknown;
  return attribute->truth ? VqaAnswer::Yes : VqaAnswer::No;
}

VqaAnswer HumanVlm::do_answer(const VqaRequest& request) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const Photo photo = take_photo(*world_, request.image.target,
                                 request.image.angle, request.image.iteration);
  std::ostream& out = *out_;
  out << "--- oracle question ---\n";
  out << "image: "
      << (request.image.is_scene() ? std::string("scene") : request.image.target)
      << " from " << to_string(request.image.angle) << "\n";
  out << "visible facts:\n";
  if (photo.facts.empty()) out << "  (none)\n";
  for (const auto& fact : photo.facts) {
    out << "  " << fact.object << "." << fact.key << " = "
        << (fact.truth ? "true" : "false") << "\n";
  }
  out << request.question << "\n";
  while (true) {
    out << "answer [y/n/u]: " << std::flush;
    std::string line;
    if (!std::getline(*in_, line))
      throw Error("input stream closed while waiting for a human answer");
    const std::string value = to_lower(line);
    if (value == "y" || value == "yes") return VqaAnswer::Yes;
    if (value == "n" || value == "no") return VqaAnswer::No;
    if (value == "u" || value == "unknown") return VqaAnswer::Unknown;
    out << "please answer y, n or u\n";
  }
}

VqaAnswer HttpVlm::do_answer(const VqaRequest& request) const {
  std::string prompt = render_vqa_prompt(*registry_, request.question).text;
  prompt += "\nRespond with a single word: yes, no, or unknown.\n";
  const std::string reply = to_lower(chat_complete(config_, prompt, 0.0, 8));

  // Earliest whole-word keyword wins.
  auto find_word = [&reply](const char* word) {
    const size_t len = std::string(word).size();
    size_t pos = reply.find(word);
    while (pos != std::string::npos) {
      const bool left_ok =
          pos == 0 || !std::isalpha(static_cast<unsigned char>(reply[pos - 1]));
      const bool right_ok =
          pos + len >= reply.size() ||
          !std::isalpha(static_cast<unsigned char>(reply[pos + len]));
      if (left_ok && right_ok) return pos;
      pos = reply.find(word, pos + 1);
    }
    return std::string::npos;
  };
  size_t best = std::string::npos;
  VqaAnswer answer = VqaAnswer::Unknown;
  auto consider = [&](const char* word, VqaAnswer value) {
    const size_t pos = find_word(word);
    if (pos != std::string::npos && pos < best) {
      best = pos;
      answer = value;
    }
  };
  consider("unknown", VqaAnswer::Unknown);
  consider("yes", VqaAnswer::Yes);
  consider("no", VqaAnswer::No);
  if (best == std::string::npos)
    throw ParseError("VLM reply '" + reply + "' contains no yes/no/unknown");
  return answer;
}

std::unique_ptr<LlmBackend> make_llm_backend(const std::string& kind,
                                             const std::string& fixture_dir,
                                             const std::string& mode) {
  if (kind == "scripted") {
    if (fixture_dir.empty())
      throw ConfigError("scripted LLM backend requires a fixture directory");
    return std::make_unique<ScriptedLlm>(ScriptedLlm::load(fixture_dir, mode));
  }
  if (kind == "http")
    return std::make_unique<HttpLlm>(HttpConfig::from_env("LLM"));
  throw ConfigError("unknown LLM backend '" + kind + "'");
}

std::unique_ptr<VlmBackend> make_vlm_backend(const std::string& kind,
                                             const std::string& fixture_dir,
                                             const WorldSpec* world) {
  if (kind == "scripted") {
    if (fixture_dir.empty())
      throw ConfigError("scripted VLM backend requires a fixture directory");
    return std::make_unique<ScriptedVlm>(ScriptedVlm::load(fixture_dir));
  }
  if (kind == "http")
    return std::make_unique<HttpVlm>(HttpConfig::from_env("VLM"));
  if (kind == "oracle") {
    if (world == nullptr)
      throw ConfigError("oracle VLM backend requires a world");
    return std::make_unique<OracleVlm>(*world);
  }
  if (kind == "human") {
    if (world == nullptr)
      throw ConfigError("human VLM backend requires a world");
    return std::make_unique<HumanVlm>(*world, std::cin, std::cout);
  }
  throw ConfigError("unknown VLM backend '" + kind + "'");
}

}  // namespace tidyloop
