#pragma once

#include <functional>
#include <unordered_set>
#include <vector>

#include "craft/arena.hpp"
#include "craft/rng.hpp"
#include "craft/types.hpp"

namespace craft::async {

// Continuous-time action duration model. Base durations depend on the
// (previous, current) action pair; context multipliers apply when the robot
// is carrying an object or sitting in a slope. Jitter is a multiplicative
// uniform half-width.
struct DurationModel {
  double straight_continue = 0.7;  // same translation action repeated
  double straight_start = 1.0;     // translation from rest or after a turn
  double lateral = 1.1;
  double turn = 1.2;
  double lift_drop = 1.5;
  double fold_unfold = 2.0;
  double stop = 0.3;
  double carry_factor = 1.25;
  double slope_factor = 1.25;
  double jitter = 0.1;

  double base(Action prev, Action cur) const;
  // Mean over the seven base table entries; fixes the wall-clock horizon.
  double mean_step_duration() const;

  bool operator==(const DurationModel&) const = default;
};

struct DurationContext {
  bool carrying = false;
  bool on_slope = false;
};

double duration_of(const DurationModel& model, Action prev, Action cur,
                   const DurationContext& ctx, Rng& rng);

struct AsyncEvent {
  double time = 0.0;
  int robot = -1;
  Action action = Action::Stop;
};

// One record per policy decision (plus a terminal record with robot = -1).
struct TrajRecord {
  double time = 0.0;        // seconds (async) or step index (sync)
  int deciding_robot = -1;  // -1 for joint/terminal records
  WorldState state;         // projected discrete state seen by the decider
  std::vector<Action> in_flight;  // current action per robot (Stop if idle)
  std::vector<double> team_rewards;  // produced since the previous record
  uint16_t mask_bits = 0;   // legal mask of the deciding robot
  bool replaced = false;    // chosen action was illegal at execution time
};

struct Trajectory {
  uint64_t id = 0;
  std::vector<TrajRecord> records;
  int outcome_team = -1;
  bool success = false;
};

// state -> (agent id, legal mask) -> action
using Policy = std::function<Action(const WorldState&, int, const ActionMask&)>;

// Event-driven episode: each robot, upon completing its action, is queried
// with the current projected world. Completions sharing an identical
// timestamp are applied jointly with the synchronous conflict resolution, so
// a constant-duration zero-jitter model reproduces the synchronous rollout.
Trajectory run_async_episode(const Policy& policy, const WorldState& start,
                             const DurationModel& model, const TaskSpec& spec,
                             uint64_t seed);

// Maps an in-flight snapshot onto a valid discrete state: every in-flight
// robot appears at its last completed cell.
WorldState project(const std::vector<AsyncEvent>& in_flight,
                   const WorldState& base);

using SignatureSet = std::unordered_set<std::string>;

bool detect_ood(const WorldState& state, const SignatureSet& sync_visited);

}  // namespace craft::async
