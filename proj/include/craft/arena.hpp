#pragma once

#include <string>
#include <vector>

#include "craft/rng.hpp"
#include "craft/types.hpp"

namespace craft::arena {

// Builds a fresh world from the task spec. Robots without a fixed spawn cell
// are placed on seeded-shuffled free ground cells. Throws ConfigError on an
// inconsistent spec (overlapping placements, targets outside the grid, or a
// competitive inventory that is not exactly one block short).
WorldState init_task(const TaskSpec& spec, uint64_t seed);

// Validates a spec without instantiating a world. Throws ConfigError.
void validate_spec(const TaskSpec& spec);

// Hard-constraint mask: allowed[a] is false exactly when a violates a
// physical or robot constraint in `state`. Stop is always allowed.
ActionMask legal_action_mask(const WorldState& state, const TaskSpec& spec,
                             int agent);

// Rule-based guidance on top of the legality mask. Never re-enables a
// base-masked action; Stop stays allowed.
ActionMask guided_action_mask(const WorldState& state, const TaskSpec& spec,
                              int agent, const ActionMask& base);

// Synchronous joint transition. Masked-invalid actions are replaced by Stop
// before execution; surviving actions are applied simultaneously with
// deterministic conflict resolution (ascending robot id wins, move chains
// allowed, swaps forbidden).
StepResult step_sync(const WorldState& state, const TaskSpec& spec,
                     const std::vector<Action>& joint_action);

// Applies a single agent's action to the state, assuming it is legal.
// Used internally by step_sync and by the asynchronous simulator.
void apply_action(WorldState& state, const TaskSpec& spec, int agent,
                  Action a);

// Applies simultaneous actions for a subset of robots with the same
// validation and conflict resolution as step_sync (no step counter or reward
// bookkeeping). Entries are (robot index, action), ascending by id; entries
// that end up executing as Stop get their flag set.
std::vector<bool> apply_joint_actions(WorldState& state, const TaskSpec& spec,
                                      std::vector<std::pair<int, Action>>& acts);

// Per-agent observation: the agent's own entry first, remaining robots in id
// order, then objects in id order.
Observation observe(const WorldState& state, int agent);
// Joint observation for the centralized critic: all robots then all objects
// in global id order.
Observation observe_joint(const WorldState& state);

int observation_size(const TaskSpec& spec);
int joint_observation_size(const TaskSpec& spec);

// Per-team reward for the transition prev -> next.
std::vector<double> reward(const WorldState& prev, const WorldState& next,
                           const TaskSpec& spec);

// Number of correctly placed target pieces per team.
std::vector<int> compute_progress(const WorldState& state,
                                  const TaskSpec& spec);

bool is_done(const WorldState& state, const TaskSpec& spec);
// Team that completed its target, or -1.
int winning_team(const WorldState& state, const TaskSpec& spec);

// Checks every WorldState invariant; returns an empty string when valid,
// otherwise a description of the first violation.
std::string check_invariants(const WorldState& state, const TaskSpec& spec);

// Canonical serialization of the state minus step_count; used as the
// visitation signature for OOD detection.
std::string signature(const WorldState& state);

}  // namespace craft::arena
