#include "tidyloop/angle.hpp"

#include "tidyloop/error.hpp"

namespace tidyloop {

std::string to_string(Angle angle) {
  switch (angle) {
    case Angle::Front:
      return "FRONT";
    case Angle::Back:
      return "BACK";
    case Angle::Left:
      return "LEFT";
    case Angle::Right:
      return "RIGHT";
    case Angle::Top:
      return "TOP";
    case Angle::Scene:
      return "SCENE";
  }
  throw Error("invalid Angle value");
}

Angle angle_from_string(const std::string& name) {
  if (name == "FRONT") return Angle::Front;
  if (name == "BACK") return Angle::Back;
  if (name == "LEFT") return Angle::Left;
  if (name == "RIGHT") return Angle::Right;
  if (name == "TOP") return Angle::Top;
  if (name == "SCENE") return Angle::Scene;
  throw ParseError("unknown angle name: '" + name + "'");
}

}  // namespace tidyloop
