#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tidyloop/angle.hpp"
#include "tidyloop/benchmark.hpp"

namespace tidyloop {

// One ground-truth fact about an object. `phrase` is the canonical yes/no
// question text and doubles as the join key the oracle answers against.
// `visible_from` lists every angle that reveals the fact; it may be empty.
struct Attribute {
  std::string key;
  std::string phrase;
  bool truth = false;
  std::set<Angle> visible_from;
};

// Per-verb receptacle targets declared for an object.
struct ReceptacleMap {
  std::string relocate;
  std::string cleanup;
};

struct SimObject {
  std::string name;  // lowercase, unique per surface
  std::vector<Attribute> attributes;
  ReceptacleMap receptacles;
  // Correct benchmark letters for synthetic label generation; may be empty.
  std::set<char> ground_truth_options;
  // Optional close-up image paths keyed by angle name; carried through for
  // future real-image suites, ignored by the oracle backend.
  std::map<std::string, std::string> images;
};

struct WorldSpec {
  std::string surface;
  std::vector<SimObject> objects;
  std::vector<std::string> receptacles;
  std::vector<BenchmarkQuestion> benchmark;
  std::string scene_image;  // optional, ignored by the oracle backend

  const SimObject* find_object(const std::string& name) const;
  std::vector<std::string> object_names() const;
  bool has_receptacle(const std::string& name) const;
};

// Reference to a photo that was (notionally) taken. `target` is an object
// name, or empty for the whole-surface shot; target is empty iff the angle
// is SCENE.
struct ImageRef {
  std::string target;
  Angle angle = Angle::Scene;
  int iteration = 0;

  bool is_scene() const { return target.empty(); }
};

struct VisibleFact {
  std::string object;
  std::string key;
  bool truth = false;
};

struct Photo {
  ImageRef ref;
  std::vector<VisibleFact> facts;
};

struct Location {
  enum class Kind { OnSurface, InReceptacle };
  Kind kind = Kind::OnSurface;
  std::string receptacle;  // set iff kind == InReceptacle

  static Location on_surface() { return {}; }
  static Location in_receptacle(std::string name) {
    return {Kind::InReceptacle, std::move(name)};
  }
  std::string to_string() const;
  bool operator==(const Location& other) const = default;
};

struct ObjectState {
  std::string name;
  Location location;
  bool handled = false;
};

// Mutable counterpart of a WorldSpec: object locations and handled flags.
// Mutation happens only through execute_skill.
struct WorldState {
  std::vector<ObjectState> objects;

  const ObjectState* find(const std::string& name) const;
  ObjectState* find(const std::string& name);
};

struct LeaveAloneSkill {
  std::string object;
};
struct RelocateSkill {
  std::string object;
  std::string designated;
};
struct CleanupSkill {
  std::string object;
  std::string designated;
};
using Skill = std::variant<LeaveAloneSkill, RelocateSkill, CleanupSkill>;

// Reads and fully validates a world-spec JSON file. Unknown fields are
// rejected; every cross-reference must resolve. Throws ParseError with the
// offending field path, or ReferenceError naming the dangling identifier.
WorldSpec load_world(const std::string& path);

// Same validation from an already-parsed document (used by tests and the
// suite generator).
WorldSpec world_from_json(const nlohmann::json& doc);

nlohmann::ordered_json to_json(const WorldSpec& spec);

WorldState initial_state(const WorldSpec& spec);

// Returns the fact set an image from `angle` reveals. For an object target
// the angle must be one of the five close-ups; pass an empty target with
// Angle::Scene for the whole-surface shot, which reveals the union of every
// object's SCENE-visible attributes. Never mutates anything.
Photo take_photo(const WorldSpec& spec, const std::string& target, Angle angle,
                 int iteration);

// Applies one skill. relocate/cleanup move the object into the designated
// receptacle and mark it handled; leave_alone only marks it handled. All
// other objects are untouched. Throws ReferenceError for an unknown object
// and Error when relocate/cleanup arrive without a designated receptacle
// (which signals a validation bypass upstream).
void execute_skill(WorldState& state, const Skill& skill);

nlohmann::ordered_json to_json(const WorldState& state);

}  // namespace tidyloop
