#include "tidyloop/context.hpp"

namespace tidyloop {

std::vector<ContextEntry> Context::entries_for(const std::string& object) const {
  std::vector<ContextEntry> out;
  for (const auto& entry : entries) {
    if (entry.object == object) out.push_back(entry);
  }
  return out;
}

}  // namespace tidyloop
