#pragma once

#include <map>
#include <set>
#include <string>

namespace tidyloop {
namespace assets {

extern const int kTemplatePackVersion;

struct TemplateSource {
  const char* id;
  std::string body;
  std::set<std::string> slots;
};

const std::map<std::string, TemplateSource>& template_sources();

}  // namespace assets
}  // namespace tidyloop
