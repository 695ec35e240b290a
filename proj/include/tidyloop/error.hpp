#pragma once

#include <stdexcept>
#include <string>

namespace tidyloop {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Malformed input text: world-spec JSON, LLM output, DSL source.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A cross-reference names something that was never declared.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

// Scripted backend has no entry for the requested key.
class FixtureError : public Error {
 public:
  using Error::Error;
};

// HTTP request failed after the retry budget was spent.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Bad flags, missing environment variables, inconsistent options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tidyloop
