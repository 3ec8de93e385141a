#include "craft/types.hpp"

#include <algorithm>

namespace craft {

const char* heading_name(Heading h) {
  switch (h) {
    case Heading::North: return "N";
    case Heading::East: return "E";
    case Heading::South: return "S";
    case Heading::West: return "W";
  }
  return "?";
}

Heading heading_from_name(const std::string& name) {
  if (name == "N" || name == "north" || name == "North") return Heading::North;
  if (name == "E" || name == "east" || name == "East") return Heading::East;
  if (name == "S" || name == "south" || name == "South") return Heading::South;
  if (name == "W" || name == "west" || name == "West") return Heading::West;
  throw ConfigError("unknown heading: " + name);
}

namespace {
const char* kActionNames[kNumActions] = {
    "MoveForward", "MoveBack", "MoveLeft", "MoveRight", "TurnLeft",
    "TurnRight",   "Lift",     "Drop",     "Fold",      "Unfold",
    "Stop"};
}

const char* action_name(Action a) {
  return kActionNames[static_cast<int>(a)];
}

Action action_from_name(const std::string& name) {
  for (int i = 0; i < kNumActions; ++i)
    if (name == kActionNames[i]) return static_cast<Action>(i);
  throw ConfigError("unknown action: " + name);
}

const char* kind_name(ObjectKind k) {
  return k == ObjectKind::Block ? "Block" : "Slope";
}

const RobotState& WorldState::robot(int id) const {
  for (const auto& r : robots)
    if (r.id == id) return r;
  throw LookupError("unknown robot id " + std::to_string(id));
}

RobotState& WorldState::robot(int id) {
  for (auto& r : robots)
    if (r.id == id) return r;
  throw LookupError("unknown robot id " + std::to_string(id));
}

const ObjectState& WorldState::object(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return o;
  throw LookupError("unknown object id " + std::to_string(id));
}

ObjectState& WorldState::object(int id) {
  for (auto& o : objects)
    if (o.id == id) return o;
  throw LookupError("unknown object id " + std::to_string(id));
}

const ObjectState* WorldState::object_at(int x, int y, int level) const {
  for (const auto& o : objects) {
    if (o.carried_by) continue;
    if (o.pos.x == x && o.pos.y == y && o.pos.level == level) return &o;
  }
  return nullptr;
}

const RobotState* WorldState::robot_at(int x, int y, int level) const {
  for (const auto& r : robots) {
    if (r.pos.x == x && r.pos.y == y && r.pos.level == level) return &r;
  }
  return nullptr;
}

}  // namespace craft
