#include "tidyloop/world.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "tidyloop/error.hpp"

namespace tidyloop {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool has_uppercase(const std::string& text) {
  return std::any_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isupper(c) != 0;
  });
}

void reject_unknown_fields(const json& node, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : node.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* name) {
          return key == name;
        }) == allowed.end()) {
      throw ParseError(where + " has unknown field '" + key + "'");
    }
  }
}

Attribute attribute_from_json(const json& node, const std::string& where) {
  if (!node.is_object()) throw ParseError(where + " must be an object");
  reject_unknown_fields(node, where, {"key", "phrase", "truth", "visible_from"});
  Attribute attribute;
  try {
    attribute.key = node.at("key").get<std::string>();
    attribute.phrase = node.at("phrase").get<std::string>();
    attribute.truth = node.at("truth").get<bool>();
    for (const auto& entry : node.at("visible_from")) {
      attribute.visible_from.insert(angle_from_string(entry.get<std::string>()));
    }
  } catch (const json::exception& ex) {
    throw ParseError(where + ": " + ex.what());
  }
  if (attribute.key.empty()) throw ParseError(where + " has empty key");
  if (attribute.phrase.empty()) throw ParseError(where + " has empty phrase");
  return attribute;
}

SimObject object_from_json(const json& node, size_t index) {
  const std::string where = "objects[" + std::to_string(index) + "]";
  if (!node.is_object()) throw ParseError(where + " must be an object");
  reject_unknown_fields(
      node, where,
      {"name", "attributes", "receptacles", "ground_truth_options", "images"});
  SimObject object;
  try {
    object.name = node.at("name").get<std::string>();
  } catch (const json::exception& ex) {
    throw ParseError(where + ": " + ex.what());
  }
  if (object.name.empty()) throw ParseError(where + " has empty name");
  if (has_uppercase(object.name))
    throw ParseError(where + " name '" + object.name +
                     "' must be lowercase");
  if (node.contains("attributes")) {
    size_t attr_index = 0;
    for (const auto& entry : node.at("attributes")) {
      object.attributes.push_back(attribute_from_json(
          entry, where + ".attributes[" + std::to_string(attr_index) + "]"));
      ++attr_index;
    }
  }
  if (node.contains("receptacles")) {
    const auto& receptacles = node.at("receptacles");
    reject_unknown_fields(receptacles, where + ".receptacles",
                          {"relocate", "cleanup"});
    try {
      if (receptacles.contains("relocate"))
        object.receptacles.relocate = receptacles.at("relocate").get<std::string>();
      if (receptacles.contains("cleanup"))
        object.receptacles.cleanup = receptacles.at("cleanup").get<std::string>();
    } catch (const json::exception& ex) {
      throw ParseError(where + ".receptacles: " + ex.what());
    }
  }
  if (node.contains("ground_truth_options")) {
    for (const auto& entry : node.at("ground_truth_options")) {
      const auto letter = entry.get<std::string>();
      if (letter.size() != 1 || letter[0] < 'a' || letter[0] > 'e')
        throw ParseError(where + ".ground_truth_options entry '" + letter +
                         "' outside (a)-(e)");
      object.ground_truth_options.insert(letter[0]);
    }
  }
  if (node.contains("images")) {
    for (const auto& [angle_name, path] : node.at("images").items()) {
      angle_from_string(angle_name);  // validates the key
      object.images[angle_name] = path.get<std::string>();
    }
  }
  return object;
}

}  // namespace

const SimObject* WorldSpec::find_object(const std::string& name) const {
  for (const auto& object : objects) {
    if (object.name == name) return &object;
  }
  return nullptr;
}

std::vector<std::string> WorldSpec::object_names() const {
  std::vector<std::string> names;
  names.reserve(objects.size());
  for (const auto& object : objects) names.push_back(object.name);
  return names;
}

bool WorldSpec::has_receptacle(const std::string& name) const {
  return std::find(receptacles.begin(), receptacles.end(), name) !=
         receptacles.end();
}

std::string Location::to_string() const {
  return kind == Kind::OnSurface ? "on_surface" : "in_receptacle:" + receptacle;
}

const ObjectState* WorldState::find(const std::string& name) const {
  for (const auto& object : objects) {
    if (object.name == name) return &object;
  }
  return nullptr;
}

ObjectState* WorldState::find(const std::string& name) {
  for (auto& object : objects) {
    if (object.name == name) return &object;
  }
  return nullptr;
}

WorldSpec world_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("world spec must be a JSON object");
  reject_unknown_fields(doc, "world spec",
                        {"schema_version", "surface", "objects", "receptacles",
                         "benchmark", "scene_image"});
  if (doc.contains("schema_version")) {
    const int version = doc.at("schema_version").get<int>();
    if (version != 1)
      throw ParseError("unsupported schema_version " + std::to_string(version));
  }

  WorldSpec spec;
  try {
    spec.surface = doc.at("surface").get<std::string>();
  } catch (const json::exception& ex) {
    throw ParseError(std::string("surface: ") + ex.what());
  }

  if (!doc.contains("objects") || !doc.at("objects").is_array() ||
      doc.at("objects").empty())
    throw ParseError("world spec needs a non-empty 'objects' array");
  size_t index = 0;
  for (const auto& entry : doc.at("objects")) {
    spec.objects.push_back(object_from_json(entry, index));
    ++index;
  }

  if (doc.contains("receptacles")) {
    for (const auto& entry : doc.at("receptacles")) {
      spec.receptacles.push_back(entry.get<std::string>());
    }
  }
  if (doc.contains("scene_image"))
    spec.scene_image = doc.at("scene_image").get<std::string>();

  std::unordered_set<std::string> seen;
  for (const auto& object : spec.objects) {
    if (!seen.insert(object.name).second)
      throw ParseError("duplicate object name '" + object.name + "'");
  }
  for (const auto& object : spec.objects) {
    for (const auto& [verb, target] :
         {std::pair{"relocate", object.receptacles.relocate},
          std::pair{"cleanup", object.receptacles.cleanup}}) {
      if (!target.empty() && !spec.has_receptacle(target))
        throw ReferenceError("objects." + object.name + ".receptacles." + verb +
                             " names undeclared receptacle '" + target + "'");
    }
  }

  if (doc.contains("benchmark")) {
    for (const auto& entry : doc.at("benchmark")) {
      spec.benchmark.push_back(benchmark_question_from_json(entry));
    }
  }
  for (const auto& question : spec.benchmark) {
    if (spec.find_object(question.object) == nullptr)
      throw ReferenceError("benchmark question references undeclared object '" +
                           question.object + "'");
  }
  return spec;
}

WorldSpec load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open world spec '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ParseError("world spec '" + path + "': " + ex.what());
  }
  return world_from_json(doc);
}

ordered_json to_json(const WorldSpec& spec) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["surface"] = spec.surface;
  auto objects = ordered_json::array();
  for (const auto& object : spec.objects) {
    ordered_json node;
    node["name"] = object.name;
    auto attributes = ordered_json::array();
    for (const auto& attribute : object.attributes) {
      auto angles = ordered_json::array();
      for (Angle angle : attribute.visible_from) angles.push_back(to_string(angle));
      attributes.push_back({{"key", attribute.key},
                            {"phrase", attribute.phrase},
                            {"truth", attribute.truth},
                            {"visible_from", std::move(angles)}});
    }
    node["attributes"] = std::move(attributes);
    node["receptacles"] = {{"relocate", object.receptacles.relocate},
                           {"cleanup", object.receptacles.cleanup}};
    if (!object.ground_truth_options.empty()) {
      auto letters = ordered_json::array();
      for (char letter : object.ground_truth_options)
        letters.push_back(std::string(1, letter));
      node["ground_truth_options"] = std::move(letters);
    }
    if (!object.images.empty()) node["images"] = object.images;
    objects.push_back(std::move(node));
  }
  doc["objects"] = std::move(objects);
  doc["receptacles"] = spec.receptacles;
  if (!spec.scene_image.empty()) doc["scene_image"] = spec.scene_image;
  auto benchmark = ordered_json::array();
  for (const auto& question : spec.benchmark) benchmark.push_back(to_json(question));
  doc["benchmark"] = std::move(benchmark);
  return doc;
}

WorldState initial_state(const WorldSpec& spec) {
  WorldState state;
  state.objects.reserve(spec.objects.size());
  for (const auto& object : spec.objects) {
    state.objects.push_back({object.name, Location::on_surface(), false});
  }
  return state;
}

Photo take_photo(const WorldSpec& spec, const std::string& target, Angle angle,
                 int iteration) {
  Photo photo;
  photo.ref = ImageRef{target, angle, iteration};
  if (target.empty()) {
    if (angle != Angle::Scene)
      throw Error("whole-surface photo must use the SCENE angle");
    for (const auto& object : spec.objects) {
      for (const auto& attribute : object.attributes) {
        if (attribute.visible_from.count(Angle::Scene) > 0)
          photo.facts.push_back({object.name, attribute.key, attribute.truth});
      }
    }
    return photo;
  }
  if (angle == Angle::Scene)
    throw Error("close-up photo of '" + target + "' cannot use the SCENE angle");
  const SimObject* object = spec.find_object(target);
  if (object == nullptr)
    throw ReferenceError("unknown object '" + target + "'");
  for (const auto& attribute : object->attributes) {
    if (attribute.visible_from.count(angle) > 0)
      photo.facts.push_back({object->name, attribute.key, attribute.truth});
  }
  return photo;
}

void execute_skill(WorldState& state, const Skill& skill) {
  const auto apply_move = [&state](const std::string& name,
                                   const std::string& designated,
                                   const char* verb) {
    if (designated.empty())
      throw Error(std::string(verb) + "('" + name +
                  "') without a designated receptacle (validation bypass)");
    ObjectState* object = state.find(name);
    if (object == nullptr) throw ReferenceError("unknown object '" + name + "'");
    object->location = Location::in_receptacle(designated);
    object->handled = true;
  };
  if (const auto* leave = std::get_if<LeaveAloneSkill>(&skill)) {
    ObjectState* object = state.find(leave->object);
    if (object == nullptr)
      throw ReferenceError("unknown object '" + leave->object + "'");
    object->handled = true;
  } else if (const auto* relocate = std::get_if<RelocateSkill>(&skill)) {
    apply_move(relocate->object, relocate->designated, "relocate");
  } else if (const auto* cleanup = std::get_if<CleanupSkill>(&skill)) {
    apply_move(cleanup->object, cleanup->designated, "cleanup");
  }
}

ordered_json to_json(const WorldState& state) {
  ordered_json doc;
  auto objects = ordered_json::array();
  for (const auto& object : state.objects) {
    ordered_json node;
    node["name"] = object.name;
    node["location"] = object.location.to_string();
    node["handled"] = object.handled;
    objects.push_back(std::move(node));
  }
  doc["objects"] = std::move(objects);
  return doc;
}

}  // namespace tidyloop
