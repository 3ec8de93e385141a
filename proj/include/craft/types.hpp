#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace craft {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Headings and actions
// ---------------------------------------------------------------------------

enum class Heading : uint8_t { North = 0, East = 1, South = 2, West = 3 };

constexpr int kNumHeadings = 4;

inline Heading turn_left(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}
inline Heading turn_right(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}
inline Heading opposite(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 2) % 4);
}

// Unit cell offset of a heading. North is +y.
inline std::pair<int, int> heading_delta(Heading h) {
  switch (h) {
    case Heading::North: return {0, 1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, -1};
    case Heading::West: return {-1, 0};
  }
  return {0, 0};
}

const char* heading_name(Heading h);
Heading heading_from_name(const std::string& name);

enum class Action : uint8_t {
  MoveForward = 0,
  MoveBack = 1,
  MoveLeft = 2,
  MoveRight = 3,
  TurnLeft = 4,
  TurnRight = 5,
  Lift = 6,
  Drop = 7,
  Fold = 8,
  Unfold = 9,
  Stop = 10,
};

constexpr int kNumActions = 11;

const char* action_name(Action a);
Action action_from_name(const std::string& name);

inline bool is_translation(Action a) {
  return a == Action::MoveForward || a == Action::MoveBack ||
         a == Action::MoveLeft || a == Action::MoveRight;
}
inline bool is_turn(Action a) {
  return a == Action::TurnLeft || a == Action::TurnRight;
}

// Per-agent validity vector over the 11 actions. Stop is always allowed.
struct ActionMask {
  std::array<bool, kNumActions> allowed{};

  ActionMask() { allowed[static_cast<int>(Action::Stop)] = true; }

  bool operator[](Action a) const { return allowed[static_cast<int>(a)]; }
  void set(Action a, bool v) { allowed[static_cast<int>(a)] = v; }
  int count_allowed() const {
    int n = 0;
    for (bool b : allowed) n += b ? 1 : 0;
    return n;
  }
  bool is_subset_of(const ActionMask& other) const {
    for (int i = 0; i < kNumActions; ++i)
      if (allowed[i] && !other.allowed[i]) return false;
    return true;
  }
  bool operator==(const ActionMask& o) const { return allowed == o.allowed; }
};

// ---------------------------------------------------------------------------
// World entities
// ---------------------------------------------------------------------------

struct GridPos {
  int x = 0;
  int y = 0;
  int level = 0;  // 0 = ground, 1 = second floor

  bool operator==(const GridPos& o) const {
    return x == o.x && y == o.y && level == o.level;
  }
  bool same_cell(int ox, int oy) const { return x == ox && y == oy; }
};

enum class ObjectKind : uint8_t { Block = 0, Slope = 1 };

const char* kind_name(ObjectKind k);

// For slopes, `heading` is the direction the high end of the unfolded ramp
// faces; the opening (low end, entry side) is the opposite direction.
// Blocks keep a fixed canonical heading (North).
struct ObjectState {
  int id = 0;
  ObjectKind kind = ObjectKind::Block;
  GridPos pos;
  Heading heading = Heading::North;
  bool folded = false;  // slopes only; blocks always false
  std::optional<int> carried_by;

  Heading opening() const { return opposite(heading); }
  bool is_ramp() const { return kind == ObjectKind::Slope && !folded; }
};

struct RobotState {
  int id = 0;
  int team = 0;
  GridPos pos;
  Heading heading = Heading::North;
  std::optional<int> carrying;
  bool under_block = false;
  bool in_slope = false;
};

// ---------------------------------------------------------------------------
// Task specification
// ---------------------------------------------------------------------------

enum class TaskMode : uint8_t { Cooperative = 0, Competitive = 1 };

struct TargetPiece {
  GridPos pos;
  ObjectKind kind = ObjectKind::Block;
  // Slopes only: required orientation (high-end direction) and fold state.
  std::optional<Heading> heading;
  bool require_unfolded = false;
};

struct CellRegion {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bounds
  bool contains(int x, int y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
};

struct RobotSpawn {
  int team = 0;
  std::optional<GridPos> pos;        // absent -> seeded random free cell
  Heading heading = Heading::North;
};

struct InitialObject {
  ObjectKind kind = ObjectKind::Block;
  GridPos pos;
  Heading heading = Heading::North;
  bool folded = false;
};

struct TaskSpec {
  std::string name;
  TaskMode mode = TaskMode::Cooperative;
  int width = 9;
  int height = 9;
  std::vector<std::vector<TargetPiece>> targets;  // per team
  std::vector<CellRegion> territories;            // per team, Competitive only
  std::vector<InitialObject> inventory;
  std::vector<RobotSpawn> robots;
  double r_build = 1.0;
  double r_completion = 5.0;
  int horizon = 500;

  int num_teams() const { return mode == TaskMode::Competitive ? 2 : 1; }
  int target_count(int team) const {
    return static_cast<int>(targets.at(team).size());
  }
};

// ---------------------------------------------------------------------------
// World state
// ---------------------------------------------------------------------------

struct WorldState {
  int width = 0;
  int height = 0;
  std::vector<RobotState> robots;
  std::vector<ObjectState> objects;
  int step_count = 0;
  std::vector<int> progress;  // per team, correctly placed target pieces

  const RobotState& robot(int id) const;
  RobotState& robot(int id);
  const ObjectState& object(int id) const;
  ObjectState& object(int id);

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  // Non-carried object occupying (x, y, level), or nullptr.
  const ObjectState* object_at(int x, int y, int level) const;
  // Robot at (x, y, level), or nullptr.
  const RobotState* robot_at(int x, int y, int level) const;
};

using Observation = std::vector<double>;

// Per-step info emitted by the synchronous transition.
struct StepInfo {
  std::vector<bool> replaced_by_stop;  // per agent
  std::vector<int> progress_delta;     // per team
};

struct StepResult {
  WorldState state;
  std::vector<double> team_rewards;
  bool done = false;
  StepInfo info;
};

}  // namespace craft
