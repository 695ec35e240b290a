#pragma once

#include <string>
#include <vector>

namespace tidyloop {

// One question the framework asked and the answer it got back, as recorded
// in the accumulated context. `answer` is "Yes", "No" or "Unknown".
struct ContextEntry {
  int iteration = 0;
  std::string object;
  std::string question;
  std::string answer;
};

// Everything the robot knows in text form: the initial description plus the
// Q&A gathered so far. Entries are append-only and stay in (iteration,
// declared-object-order) order.
struct Context {
  std::string surface;
  std::string initial_description;
  std::vector<ContextEntry> entries;

  std::vector<ContextEntry> entries_for(const std::string& object) const;
};

}  // namespace tidyloop
