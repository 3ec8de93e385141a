#include "craft/presets.hpp"

#include <sstream>

namespace craft::presets {

namespace {

TargetPiece block_target(int x, int y, int level = 0) {
  TargetPiece t;
  t.pos = {x, y, level};
  t.kind = ObjectKind::Block;
  return t;
}

TargetPiece slope_target(int x, int y, Heading high_end) {
  TargetPiece t;
  t.pos = {x, y, 0};
  t.kind = ObjectKind::Slope;
  t.heading = high_end;
  t.require_unfolded = true;
  return t;
}

InitialObject block_at(int x, int y, int level = 0) {
  InitialObject o;
  o.kind = ObjectKind::Block;
  o.pos = {x, y, level};
  return o;
}

InitialObject slope_at(int x, int y, Heading h, bool folded = true) {
  InitialObject o;
  o.kind = ObjectKind::Slope;
  o.pos = {x, y, 0};
  o.heading = h;
  o.folded = folded;
  return o;
}

RobotSpawn free_spawn(int team) {
  RobotSpawn r;
  r.team = team;
  return r;
}

RobotSpawn fixed_spawn(int team, int x, int y, Heading h) {
  RobotSpawn r;
  r.team = team;
  r.pos = GridPos{x, y, 0};
  r.heading = h;
  return r;
}

// Single robot moves one block to a corner. Smallest learnable task.
TaskSpec fetch() {
  TaskSpec s;
  s.name = "fetch";
  s.width = 5;
  s.height = 5;
  s.horizon = 60;
  s.robots = {free_spawn(0)};
  s.inventory = {block_at(2, 2)};
  s.targets = {{block_target(0, 0)}};
  return s;
}

// Two robots, two blocks, two ground targets. Desk-scale training default.
TaskSpec coop_mini() {
  TaskSpec s;
  s.name = "coop_mini";
  s.width = 5;
  s.height = 5;
  s.horizon = 60;
  s.robots = {free_spawn(0), free_spawn(0)};
  s.inventory = {block_at(2, 1), block_at(2, 3)};
  s.targets = {{block_target(0, 2), block_target(4, 2)}};
  return s;
}

// Four robots build a five-block T.
TaskSpec coop_t() {
  TaskSpec s;
  s.name = "coop_T";
  s.width = 9;
  s.height = 9;
  s.horizon = 500;
  s.robots = {free_spawn(0), free_spawn(0), free_spawn(0), free_spawn(0)};
  s.inventory = {block_at(1, 1), block_at(3, 1), block_at(5, 1),
                 block_at(7, 1), block_at(4, 3)};
  s.targets = {{block_target(3, 7), block_target(4, 7), block_target(5, 7),
                block_target(4, 6), block_target(4, 5)}};
  return s;
}

// Two-floor structure: a stacked pair of blocks reached over a ramp.
TaskSpec coop_tower() {
  TaskSpec s;
  s.name = "coop_tower";
  s.width = 7;
  s.height = 7;
  s.horizon = 500;
  s.robots = {free_spawn(0), free_spawn(0)};
  s.inventory = {block_at(1, 3), block_at(5, 3),
                 slope_at(3, 1, Heading::North)};
  s.targets = {{block_target(3, 4, 0), block_target(3, 4, 1),
                slope_target(3, 3, Heading::North)}};
  return s;
}

// Two carriers funnel single-file through a two-cell corridor in a wall of
// unliftable (double-stacked) blocks. Synchronous play admits tight pipelined
// move chains through the bottleneck; desynchronized timing breaks them.
TaskSpec desk() {
  TaskSpec s;
  s.name = "desk";
  s.width = 3;
  s.height = 9;
  s.horizon = 20;
  s.robots = {fixed_spawn(0, 0, 0, Heading::North),
              fixed_spawn(0, 2, 0, Heading::North)};
  s.inventory = {block_at(0, 1), block_at(2, 1),
                 // Wall: carriers must funnel through (1, 4) and (1, 5).
                 block_at(0, 4, 0), block_at(0, 4, 1),
                 block_at(2, 4, 0), block_at(2, 4, 1),
                 block_at(0, 5, 0), block_at(0, 5, 1),
                 block_at(2, 5, 0), block_at(2, 5, 1)};
  s.targets = {{block_target(0, 7), block_target(2, 7)}};
  return s;
}

// Two teams race for a shared pool that is one block short.
TaskSpec comp_mini() {
  TaskSpec s;
  s.name = "comp_mini";
  s.mode = TaskMode::Competitive;
  s.width = 7;
  s.height = 10;
  s.horizon = 150;
  s.territories = {CellRegion{0, 0, 6, 4}, CellRegion{0, 5, 6, 9}};
  s.robots = {fixed_spawn(0, 1, 1, Heading::North),
              fixed_spawn(0, 5, 1, Heading::North),
              fixed_spawn(1, 1, 8, Heading::South),
              fixed_spawn(1, 5, 8, Heading::South)};
  s.inventory = {block_at(1, 4), block_at(3, 5), block_at(5, 4)};
  s.targets = {{block_target(2, 2), block_target(4, 2)},
               {block_target(2, 7), block_target(4, 7)}};
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fetch", "coop_mini", "coop_T", "coop_tower", "desk", "comp_mini"};
}

TaskSpec get(const std::string& name) {
  if (name == "fetch") return fetch();
  if (name == "coop_mini") return coop_mini();
  if (name == "coop_T") return coop_t();
  if (name == "coop_tower") return coop_tower();
  if (name == "desk") return desk();
  if (name == "comp_mini") return comp_mini();
  std::ostringstream os;
  os << "unknown preset '" << name << "'; valid presets:";
  for (const auto& n : preset_names()) os << ' ' << n;
  throw ConfigError(os.str());
}

}  // namespace craft::presets
