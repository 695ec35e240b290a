#pragma once

#include <array>
#include <string>

namespace tidyloop {

// Camera viewpoints. SCENE is the whole-surface shot; the other five are
// the close-up set a robot can servo to.
enum class Angle { Front, Back, Left, Right, Top, Scene };

inline constexpr std::array<Angle, 5> kCloseUpAngles = {
    Angle::Front, Angle::Back, Angle::Left, Angle::Right, Angle::Top};

std::string to_string(Angle angle);

// Accepts the canonical uppercase names (FRONT, BACK, LEFT, RIGHT, TOP,
// SCENE); throws ParseError otherwise.
Angle angle_from_string(const std::string& name);

}  // namespace tidyloop
