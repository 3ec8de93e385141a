#include "craft/arena.hpp"

#include <algorithm>
#include <sstream>

namespace craft::arena {

namespace {

// Non-carried slope at the robot's cell (slopes live on the ground level).
const ObjectState* slope_at_robot(const WorldState& s, const RobotState& r) {
  if (r.pos.level != 0) return nullptr;
  const ObjectState* o = s.object_at(r.pos.x, r.pos.y, 0);
  if (o && o->kind == ObjectKind::Slope) return o;
  return nullptr;
}

const ObjectState* block_at_robot(const WorldState& s, const RobotState& r) {
  const ObjectState* o = s.object_at(r.pos.x, r.pos.y, r.pos.level);
  if (o && o->kind == ObjectKind::Block) return o;
  return nullptr;
}

void update_flags(const WorldState& s, RobotState& r) {
  r.under_block = !r.carrying && block_at_robot(s, r) != nullptr;
  r.in_slope = !r.carrying && slope_at_robot(s, r) != nullptr;
}

std::pair<int, int> move_delta(const RobotState& r, Action a) {
  switch (a) {
    case Action::MoveForward: return heading_delta(r.heading);
    case Action::MoveBack: return heading_delta(opposite(r.heading));
    case Action::MoveLeft: return heading_delta(turn_left(r.heading));
    case Action::MoveRight: return heading_delta(turn_right(r.heading));
    default: return {0, 0};
  }
}

// Destination of a translation action, or nullopt when the move is illegal.
// Handles ground movement, rear entry into slopes, climbing (MoveBack from an
// unfolded slope), level-1 movement over supported cells, and descending
// (MoveForward from level 1 into a slope whose high end faces the robot).
// `robots_block`: during execution a robot at the destination blocks the move
// (the joint fixpoint may free it within the step); for mask legality robot
// occupancy is ignored so that move chains stay expressible.
std::optional<GridPos> resolve_move(const WorldState& s, const RobotState& r,
                                    Action a, bool robots_block = true) {
  if (!is_translation(a)) return std::nullopt;
  const ObjectState* here_slope = slope_at_robot(s, r);

  // Inside a slope: only straight exit (forward, through the opening) or
  // climb (back, toward the high end) are possible.
  if (here_slope) {
    if (a == Action::MoveForward) {
      auto [dx, dy] = heading_delta(r.heading);
      int tx = r.pos.x + dx, ty = r.pos.y + dy;
      if (!s.in_bounds(tx, ty)) return std::nullopt;
      if (robots_block && s.robot_at(tx, ty, 0)) return std::nullopt;
      const ObjectState* o = s.object_at(tx, ty, 0);
      if (o) {
        if (o->kind == ObjectKind::Slope) return std::nullopt;  // rear entry only
        if (r.carrying) return std::nullopt;  // carried object collides overhead
      }
      return GridPos{tx, ty, 0};
    }
    if (a == Action::MoveBack) {
      if (here_slope->folded) return std::nullopt;
      auto [dx, dy] = heading_delta(here_slope->heading);  // toward the high end
      int tx = r.pos.x + dx, ty = r.pos.y + dy;
      if (!s.in_bounds(tx, ty)) return std::nullopt;
      if (robots_block && s.robot_at(tx, ty, 1)) return std::nullopt;
      const ObjectState* support = s.object_at(tx, ty, 0);
      if (!support || support->kind != ObjectKind::Block) return std::nullopt;
      const ObjectState* above = s.object_at(tx, ty, 1);
      if (above && r.carrying) return std::nullopt;
      return GridPos{tx, ty, 1};
    }
    return std::nullopt;
  }

  if (r.under_block && (a == Action::MoveLeft || a == Action::MoveRight)) {
    // A robot underneath a block cannot exit sideways.
    return std::nullopt;
  }

  auto [dx, dy] = move_delta(r, a);
  int tx = r.pos.x + dx, ty = r.pos.y + dy;
  if (!s.in_bounds(tx, ty)) return std::nullopt;

  if (r.pos.level == 0) {
    if (robots_block && s.robot_at(tx, ty, 0)) return std::nullopt;
    const ObjectState* o = s.object_at(tx, ty, 0);
    if (!o) return GridPos{tx, ty, 0};
    if (o->kind == ObjectKind::Block) {
      if (r.carrying) return std::nullopt;
      return GridPos{tx, ty, 0};  // moves underneath the block
    }
    // Slope: entry only by rolling back through the opening.
    if (a != Action::MoveBack) return std::nullopt;
    if (r.heading != o->opening()) return std::nullopt;
    return GridPos{tx, ty, 0};
  }

  // Level 1.
  const ObjectState* below = s.object_at(tx, ty, 0);
  if (below && below->kind == ObjectKind::Slope && !below->folded) {
    // Descend: the slope's high end must face the robot's cell, and the
    // robot drives forward down through the opening.
    auto [hx, hy] = heading_delta(below->heading);
    bool faces_here = below->pos.x + hx == r.pos.x && below->pos.y + hy == r.pos.y;
    if (faces_here && a == Action::MoveForward && r.heading == below->opening()) {
      if (robots_block && s.robot_at(tx, ty, 0)) return std::nullopt;
      return GridPos{tx, ty, 0};
    }
    return std::nullopt;
  }
  if (robots_block && s.robot_at(tx, ty, 1)) return std::nullopt;
  if (!below || below->kind != ObjectKind::Block) return std::nullopt;  // no support
  const ObjectState* above = s.object_at(tx, ty, 1);
  if (above) {
    if (above->kind != ObjectKind::Block) return std::nullopt;
    if (r.carrying) return std::nullopt;
  }
  return GridPos{tx, ty, 1};
}

bool action_legal(const WorldState& s, const RobotState& r, Action a) {
  switch (a) {
    case Action::Stop:
      return true;
    case Action::MoveForward:
    case Action::MoveBack:
    case Action::MoveLeft:
    case Action::MoveRight:
      return resolve_move(s, r, a, /*robots_block=*/false).has_value();
    case Action::TurnLeft:
    case Action::TurnRight:
      // The slope walls prevent turning in place.
      return slope_at_robot(s, r) == nullptr;
    case Action::Lift: {
      if (r.carrying) return false;
      if (block_at_robot(s, r)) {
        if (r.pos.level == 0) {
          if (s.object_at(r.pos.x, r.pos.y, 1)) return false;  // stacked above
          if (s.robot_at(r.pos.x, r.pos.y, 1)) return false;   // robot on top
        }
        return true;
      }
      if (const ObjectState* sl = slope_at_robot(s, r)) return sl->folded;
      return false;
    }
    case Action::Drop: {
      if (!r.carrying) return false;
      const ObjectState& o = s.object(*r.carrying);
      if (s.object_at(r.pos.x, r.pos.y, r.pos.level)) return false;
      if (o.kind == ObjectKind::Slope && r.pos.level != 0) return false;
      return true;
    }
    case Action::Fold: {
      if (r.carrying) return false;
      const ObjectState* sl = slope_at_robot(s, r);
      return sl && !sl->folded;
    }
    case Action::Unfold: {
      if (r.carrying) return false;
      const ObjectState* sl = slope_at_robot(s, r);
      return sl && sl->folded;
    }
  }
  return false;
}

// Applies a set of simultaneous actions with deterministic conflict
// resolution. Returns per-entry replaced-by-stop flags. Entries are
// (robot index, action) and must be sorted by robot id.
std::vector<bool> apply_joint(WorldState& s, const TaskSpec& spec,
                              std::vector<std::pair<int, Action>>& acts) {
  std::vector<bool> replaced(acts.size(), false);

  // Invalid actions execute as Stop.
  for (size_t k = 0; k < acts.size(); ++k) {
    auto& [i, a] = acts[k];
    if (!action_legal(s, s.robots[i], a)) {
      a = Action::Stop;
      replaced[k] = true;
    }
  }

  // Turns cannot conflict.
  for (auto& [i, a] : acts) {
    if (is_turn(a)) {
      s.robots[i].heading = a == Action::TurnLeft ? turn_left(s.robots[i].heading)
                                                  : turn_right(s.robots[i].heading);
    }
  }

  // Manipulations, ascending id, re-validated against the evolving state.
  for (size_t k = 0; k < acts.size(); ++k) {
    auto& [i, a] = acts[k];
    if (a != Action::Lift && a != Action::Drop && a != Action::Fold &&
        a != Action::Unfold)
      continue;
    if (!action_legal(s, s.robots[i], a)) {
      a = Action::Stop;
      replaced[k] = true;
      continue;
    }
    apply_action(s, spec, s.robots[i].id, a);
  }

  // Moves resolve to a fixpoint: a move applies once its destination is free
  // in the evolving state. Lower ids win contested cells; chains are allowed
  // and swaps starve (both cells stay occupied), which converts both to Stop.
  std::vector<size_t> pending;
  for (size_t k = 0; k < acts.size(); ++k)
    if (is_translation(acts[k].second)) pending.push_back(k);
  bool moved = true;
  while (moved && !pending.empty()) {
    moved = false;
    for (auto it = pending.begin(); it != pending.end();) {
      auto& [i, a] = acts[*it];
      if (resolve_move(s, s.robots[i], a)) {
        apply_action(s, spec, s.robots[i].id, a);
        it = pending.erase(it);
        moved = true;
      } else {
        ++it;
      }
    }
  }
  for (size_t k : pending) {
    acts[k].second = Action::Stop;
    replaced[k] = true;
  }
  return replaced;
}

}  // namespace

std::vector<bool> apply_joint_actions(WorldState& state, const TaskSpec& spec,
                                      std::vector<std::pair<int, Action>>& acts) {
  return apply_joint(state, spec, acts);
}

namespace {

bool target_satisfied(const WorldState& s, const TargetPiece& t) {
  const ObjectState* o = s.object_at(t.pos.x, t.pos.y, t.pos.level);
  if (!o || o->kind != t.kind) return false;
  if (t.kind == ObjectKind::Slope) {
    if (t.require_unfolded && o->folded) return false;
    if (!t.require_unfolded && !o->folded) return false;
    if (t.heading && o->heading != *t.heading) return false;
  }
  return true;
}

}  // namespace

void apply_action(WorldState& state, const TaskSpec& spec, int agent,
                  Action a) {
  (void)spec;
  RobotState& r = state.robot(agent);
  switch (a) {
    case Action::Stop:
      break;
    case Action::TurnLeft:
      r.heading = turn_left(r.heading);
      break;
    case Action::TurnRight:
      r.heading = turn_right(r.heading);
      break;
    case Action::Lift: {
      const ObjectState* target = block_at_robot(state, r);
      if (!target) target = slope_at_robot(state, r);
      ObjectState& o = state.object(target->id);
      o.carried_by = r.id;
      o.pos = r.pos;
      r.carrying = o.id;
      break;
    }
    case Action::Drop: {
      ObjectState& o = state.object(*r.carrying);
      o.carried_by.reset();
      o.pos = r.pos;
      if (o.kind == ObjectKind::Slope) {
        o.folded = true;
        o.heading = opposite(r.heading);  // opening faces the robot's heading
      }
      r.carrying.reset();
      break;
    }
    case Action::Fold:
      state.object(slope_at_robot(state, r)->id).folded = true;
      break;
    case Action::Unfold:
      state.object(slope_at_robot(state, r)->id).folded = false;
      break;
    default: {  // translations
      auto target = resolve_move(state, r, a);
      r.pos = *target;
      if (r.carrying) {
        ObjectState& o = state.object(*r.carrying);
        o.pos = r.pos;
      }
      break;
    }
  }
  update_flags(state, r);
}

ActionMask legal_action_mask(const WorldState& state, const TaskSpec& spec,
                             int agent) {
  (void)spec;
  const RobotState& r = state.robot(agent);
  ActionMask m;
  for (int i = 0; i < kNumActions; ++i)
    m.allowed[i] = action_legal(state, r, static_cast<Action>(i));
  return m;
}

ActionMask guided_action_mask(const WorldState& state, const TaskSpec& spec,
                              int agent, const ActionMask& base) {
  const RobotState& r = state.robot(agent);
  ActionMask m = base;
  const int team = r.team;
  const auto& team_targets = spec.targets.at(team);

  auto unfilled_target_here = [&](ObjectKind kind) {
    for (const auto& t : team_targets) {
      if (t.kind != kind) continue;
      if (t.pos.x == r.pos.x && t.pos.y == r.pos.y &&
          (kind == ObjectKind::Slope ? t.pos.level == 0
                                     : t.pos.level == r.pos.level) &&
          !target_satisfied(state, t))
        return true;
    }
    return false;
  };
  auto object_is_own_target = [&](const ObjectState& o) {
    for (const auto& t : team_targets) {
      if (t.kind == o.kind && t.pos == o.pos && target_satisfied(state, t))
        return true;
    }
    return false;
  };
  auto in_opponent_territory = [&]() {
    if (spec.mode != TaskMode::Competitive) return false;
    return spec.territories.at(1 - team).contains(r.pos.x, r.pos.y);
  };

  if (m[Action::Drop] && r.carrying) {
    const ObjectState& o = state.object(*r.carrying);
    bool useful = unfilled_target_here(o.kind) || in_opponent_territory();
    if (!useful) m.set(Action::Drop, false);
  }
  if (m[Action::Lift]) {
    const ObjectState* engaged = block_at_robot(state, r);
    if (!engaged) engaged = slope_at_robot(state, r);
    if (engaged && object_is_own_target(*engaged)) m.set(Action::Lift, false);
  }
  if (m[Action::Fold] || m[Action::Unfold]) {
    const ObjectState* sl = slope_at_robot(state, r);
    if (sl) {
      if (object_is_own_target(*sl)) m.set(Action::Fold, false);
      bool slope_goal_here = false;
      for (const auto& t : team_targets) {
        if (t.kind == ObjectKind::Slope && t.pos.same_cell(r.pos.x, r.pos.y) &&
            t.require_unfolded && !target_satisfied(state, t))
          slope_goal_here = true;
      }
      if (!slope_goal_here && !in_opponent_territory())
        m.set(Action::Unfold, false);
    }
  }
  // A move whose destination is currently held by another robot executes as
  // Stop unless that robot vacates; treat it as not beneficial. This also
  // breaks symmetric head-on livelocks under deterministic play.
  for (Action a : {Action::MoveForward, Action::MoveBack, Action::MoveLeft,
                   Action::MoveRight}) {
    if (!m[a]) continue;
    if (!resolve_move(state, r, a, /*robots_block=*/true)) m.set(a, false);
  }
  m.set(Action::Stop, true);
  return m;
}

StepResult step_sync(const WorldState& state, const TaskSpec& spec,
                     const std::vector<Action>& joint_action) {
  if (joint_action.size() != state.robots.size())
    throw ContractError("joint action length " +
                        std::to_string(joint_action.size()) +
                        " does not match robot count " +
                        std::to_string(state.robots.size()));
  StepResult out;
  out.state = state;
  std::vector<std::pair<int, Action>> acts;
  acts.reserve(joint_action.size());
  for (size_t i = 0; i < joint_action.size(); ++i)
    acts.emplace_back(static_cast<int>(i), joint_action[i]);
  out.info.replaced_by_stop = apply_joint(out.state, spec, acts);

  out.state.step_count = state.step_count + 1;
  out.state.progress = compute_progress(out.state, spec);
  out.team_rewards = reward(state, out.state, spec);
  out.done = is_done(out.state, spec);
  out.info.progress_delta.resize(out.state.progress.size());
  for (size_t t = 0; t < out.state.progress.size(); ++t)
    out.info.progress_delta[t] = out.state.progress[t] - state.progress[t];
  return out;
}

namespace {

void append_robot_entry(const WorldState& s, const RobotState& r,
                        Observation& v) {
  double nx = s.width > 1 ? static_cast<double>(r.pos.x) / (s.width - 1) : 0.0;
  double ny = s.height > 1 ? static_cast<double>(r.pos.y) / (s.height - 1) : 0.0;
  v.push_back(nx);
  v.push_back(ny);
  v.push_back(static_cast<double>(r.pos.level));
  for (int h = 0; h < kNumHeadings; ++h)
    v.push_back(static_cast<int>(r.heading) == h ? 1.0 : 0.0);
  int carry = 0;  // 0 none, 1 block, 2 slope
  if (r.carrying)
    carry = s.object(*r.carrying).kind == ObjectKind::Block ? 1 : 2;
  for (int c = 0; c < 3; ++c) v.push_back(carry == c ? 1.0 : 0.0);
  v.push_back(static_cast<double>(r.team));
}

void append_object_entry(const WorldState& s, const ObjectState& o,
                         Observation& v) {
  double nx = s.width > 1 ? static_cast<double>(o.pos.x) / (s.width - 1) : 0.0;
  double ny = s.height > 1 ? static_cast<double>(o.pos.y) / (s.height - 1) : 0.0;
  v.push_back(nx);
  v.push_back(ny);
  v.push_back(static_cast<double>(o.pos.level));
  v.push_back(o.kind == ObjectKind::Block ? 1.0 : 0.0);
  v.push_back(o.kind == ObjectKind::Slope ? 1.0 : 0.0);
  v.push_back(o.folded ? 1.0 : 0.0);
  v.push_back(o.carried_by ? 1.0 : 0.0);
}

}  // namespace

Observation observe(const WorldState& state, int agent) {
  const RobotState& self = state.robot(agent);
  Observation v;
  v.reserve(state.robots.size() * 11 + state.objects.size() * 7);
  append_robot_entry(state, self, v);
  for (const auto& r : state.robots)
    if (r.id != agent) append_robot_entry(state, r, v);
  for (const auto& o : state.objects) append_object_entry(state, o, v);
  return v;
}

Observation observe_joint(const WorldState& state) {
  Observation v;
  v.reserve(state.robots.size() * 11 + state.objects.size() * 7);
  for (const auto& r : state.robots) append_robot_entry(state, r, v);
  for (const auto& o : state.objects) append_object_entry(state, o, v);
  return v;
}

int observation_size(const TaskSpec& spec) {
  return static_cast<int>(spec.robots.size()) * 11 +
         static_cast<int>(spec.inventory.size()) * 7;
}

int joint_observation_size(const TaskSpec& spec) {
  return observation_size(spec);
}

std::vector<int> compute_progress(const WorldState& state,
                                  const TaskSpec& spec) {
  std::vector<int> p(spec.num_teams(), 0);
  for (int t = 0; t < spec.num_teams(); ++t)
    for (const auto& piece : spec.targets[t])
      if (target_satisfied(state, piece)) ++p[t];
  return p;
}

int winning_team(const WorldState& state, const TaskSpec& spec) {
  for (int t = 0; t < spec.num_teams(); ++t)
    if (!spec.targets[t].empty() &&
        state.progress[t] == spec.target_count(t))
      return t;
  return -1;
}

bool is_done(const WorldState& state, const TaskSpec& spec) {
  return winning_team(state, spec) >= 0 || state.step_count >= spec.horizon;
}

std::vector<double> reward(const WorldState& prev, const WorldState& next,
                           const TaskSpec& spec) {
  std::vector<double> r(spec.num_teams(), 0.0);
  for (int t = 0; t < spec.num_teams(); ++t)
    r[t] = spec.r_build * (next.progress[t] - prev.progress[t]);
  int w = winning_team(next, spec);
  if (w >= 0 && winning_team(prev, spec) < 0) {
    r[w] += spec.r_completion;
    if (spec.mode == TaskMode::Competitive) r[1 - w] -= spec.r_completion;
  }
  return r;
}

void validate_spec(const TaskSpec& spec) {
  if (spec.width < 2 || spec.height < 2)
    throw ConfigError("grid must be at least 2x2");
  if (spec.horizon < 1) throw ConfigError("horizon must be positive");
  if (!(spec.r_completion > spec.r_build))
    throw ConfigError("r_completion must exceed r_build");
  if (static_cast<int>(spec.targets.size()) != spec.num_teams())
    throw ConfigError("targets must list one set per team");
  if (spec.mode == TaskMode::Competitive && spec.territories.size() != 2)
    throw ConfigError("competitive mode needs two territories");

  auto in_grid = [&](const GridPos& p) {
    return p.x >= 0 && p.x < spec.width && p.y >= 0 && p.y < spec.height &&
           (p.level == 0 || p.level == 1);
  };

  for (size_t t = 0; t < spec.targets.size(); ++t) {
    for (size_t k = 0; k < spec.targets[t].size(); ++k) {
      const auto& piece = spec.targets[t][k];
      if (!in_grid(piece.pos))
        throw ConfigError("target " + std::to_string(k) + " of team " +
                          std::to_string(t) + " outside grid");
      if (piece.kind == ObjectKind::Slope && piece.pos.level != 0)
        throw ConfigError("slope target of team " + std::to_string(t) +
                          " must be at ground level");
      for (size_t j = 0; j < k; ++j)
        if (spec.targets[t][j].pos == piece.pos)
          throw ConfigError("duplicate target cell in team " +
                            std::to_string(t));
    }
  }

  for (size_t i = 0; i < spec.inventory.size(); ++i) {
    const auto& o = spec.inventory[i];
    if (!in_grid(o.pos))
      throw ConfigError("inventory object " + std::to_string(i) +
                        " outside grid");
    if (o.kind == ObjectKind::Slope && o.pos.level != 0)
      throw ConfigError("inventory slope " + std::to_string(i) +
                        " must be at ground level");
    for (size_t j = 0; j < i; ++j) {
      const auto& p = spec.inventory[j];
      if (p.pos == o.pos)
        throw ConfigError("inventory objects " + std::to_string(j) + " and " +
                          std::to_string(i) + " overlap");
    }
    if (o.pos.level == 1) {
      bool supported = false;
      for (const auto& p : spec.inventory)
        if (p.kind == ObjectKind::Block && p.pos.level == 0 &&
            p.pos.same_cell(o.pos.x, o.pos.y))
          supported = true;
      if (!supported)
        throw ConfigError("inventory object " + std::to_string(i) +
                          " at level 1 has no supporting block");
    }
  }

  for (size_t i = 0; i < spec.robots.size(); ++i) {
    const auto& r = spec.robots[i];
    if (r.team < 0 || r.team >= spec.num_teams())
      throw ConfigError("robot " + std::to_string(i) + " has invalid team");
    if (!r.pos) continue;
    if (!in_grid(*r.pos) || r.pos->level != 0)
      throw ConfigError("robot " + std::to_string(i) +
                        " spawn outside grid ground level");
    for (const auto& o : spec.inventory)
      if (o.pos.level == 0 && o.pos.same_cell(r.pos->x, r.pos->y))
        throw ConfigError("robot " + std::to_string(i) +
                          " spawns on an occupied cell");
    for (size_t j = 0; j < i; ++j)
      if (spec.robots[j].pos && *spec.robots[j].pos == *r.pos)
        throw ConfigError("robots " + std::to_string(j) + " and " +
                          std::to_string(i) + " share a spawn cell");
  }

  if (spec.mode == TaskMode::Competitive) {
    int needed = 0;
    for (const auto& team : spec.targets)
      for (const auto& piece : team)
        if (piece.kind == ObjectKind::Block) ++needed;
    int have = 0;
    for (const auto& o : spec.inventory)
      if (o.kind == ObjectKind::Block) ++have;
    if (have != needed - 1)
      throw ConfigError("inventory must be one block short: targets need " +
                        std::to_string(needed) + " blocks, inventory has " +
                        std::to_string(have));
  }
}

WorldState init_task(const TaskSpec& spec, uint64_t seed) {
  validate_spec(spec);
  WorldState s;
  s.width = spec.width;
  s.height = spec.height;
  s.step_count = 0;

  int oid = 0;
  for (const auto& io : spec.inventory) {
    ObjectState o;
    o.id = oid++;
    o.kind = io.kind;
    o.pos = io.pos;
    o.heading = io.kind == ObjectKind::Block ? Heading::North : io.heading;
    o.folded = io.kind == ObjectKind::Slope ? io.folded : false;
    s.objects.push_back(o);
  }

  // Fixed spawns first, then seeded-shuffled free ground cells.
  std::vector<GridPos> taken;
  int rid = 0;
  std::vector<size_t> random_spawns;
  for (size_t i = 0; i < spec.robots.size(); ++i) {
    RobotState r;
    r.id = rid++;
    r.team = spec.robots[i].team;
    r.heading = spec.robots[i].heading;
    if (spec.robots[i].pos) {
      r.pos = *spec.robots[i].pos;
      taken.push_back(r.pos);
    } else {
      random_spawns.push_back(i);
    }
    s.robots.push_back(r);
  }
  if (!random_spawns.empty()) {
    std::vector<GridPos> free_cells;
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        GridPos p{x, y, 0};
        if (s.object_at(x, y, 0)) continue;
        bool used = false;
        for (const auto& q : taken)
          if (q == p) used = true;
        if (!used) free_cells.push_back(p);
      }
    if (free_cells.size() < random_spawns.size())
      throw ConfigError("not enough free cells for robot spawns");
    Rng rng(seed);
    rng.shuffle(free_cells);
    size_t k = 0;
    for (size_t i : random_spawns) s.robots[i].pos = free_cells[k++];
  }
  for (auto& r : s.robots) update_flags(s, r);
  s.progress = compute_progress(s, spec);

  std::string err = check_invariants(s, spec);
  if (!err.empty()) throw ConfigError("inconsistent spec: " + err);
  return s;
}

std::string check_invariants(const WorldState& s, const TaskSpec& spec) {
  std::ostringstream e;
  for (const auto& r : s.robots) {
    if (!s.in_bounds(r.pos.x, r.pos.y) || (r.pos.level != 0 && r.pos.level != 1))
      return "robot " + std::to_string(r.id) + " out of bounds";
    for (const auto& q : s.robots)
      if (q.id != r.id && q.pos == r.pos)
        return "robots " + std::to_string(r.id) + " and " +
               std::to_string(q.id) + " share a cell";
    if (r.pos.level == 1) {
      const ObjectState* below = s.object_at(r.pos.x, r.pos.y, 0);
      if (!below || below->kind != ObjectKind::Block)
        return "robot " + std::to_string(r.id) + " at level 1 unsupported";
    }
    if (r.carrying) {
      const ObjectState& o = s.object(*r.carrying);
      if (!o.carried_by || *o.carried_by != r.id)
        return "carry link broken for robot " + std::to_string(r.id);
      if (!(o.pos == r.pos))
        return "carried object " + std::to_string(o.id) +
               " not at carrier position";
      if (r.under_block || r.in_slope)
        return "robot " + std::to_string(r.id) +
               " carrying while under_block/in_slope";
    }
    bool ub = !r.carrying && block_at_robot(s, r) != nullptr;
    bool is = !r.carrying && slope_at_robot(s, r) != nullptr;
    if (r.under_block != ub)
      return "robot " + std::to_string(r.id) + " under_block flag stale";
    if (r.in_slope != is)
      return "robot " + std::to_string(r.id) + " in_slope flag stale";
  }
  for (const auto& o : s.objects) {
    if (!s.in_bounds(o.pos.x, o.pos.y) || (o.pos.level != 0 && o.pos.level != 1))
      return "object " + std::to_string(o.id) + " out of bounds";
    if (o.kind == ObjectKind::Block && o.folded)
      return "block " + std::to_string(o.id) + " marked folded";
    if (o.carried_by) {
      const RobotState& r = s.robot(*o.carried_by);
      if (!r.carrying || *r.carrying != o.id)
        return "carry link broken for object " + std::to_string(o.id);
      continue;
    }
    if (o.kind == ObjectKind::Slope && o.pos.level != 0)
      return "slope " + std::to_string(o.id) + " above ground";
    if (o.pos.level == 1) {
      const ObjectState* below = s.object_at(o.pos.x, o.pos.y, 0);
      if (!below || below->kind != ObjectKind::Block)
        return "object " + std::to_string(o.id) + " at level 1 unsupported";
    }
    for (const auto& p : s.objects) {
      if (p.id == o.id || p.carried_by) continue;
      if (p.pos == o.pos)
        return "objects " + std::to_string(o.id) + " and " +
               std::to_string(p.id) + " overlap";
    }
  }
  if (static_cast<int>(s.progress.size()) != spec.num_teams())
    return "progress vector size mismatch";
  auto p = compute_progress(s, spec);
  for (size_t t = 0; t < p.size(); ++t) {
    if (s.progress[t] != p[t]) return "progress counter stale";
    if (s.progress[t] > spec.target_count(static_cast<int>(t)))
      return "progress exceeds target count";
  }
  return "";
}

std::string signature(const WorldState& s) {
  std::ostringstream os;
  os << s.width << 'x' << s.height << ';';
  for (const auto& r : s.robots) {
    os << 'R' << r.id << ',' << r.team << ',' << r.pos.x << ',' << r.pos.y
       << ',' << r.pos.level << ',' << heading_name(r.heading) << ','
       << (r.carrying ? std::to_string(*r.carrying) : "-") << ';';
  }
  for (const auto& o : s.objects) {
    os << 'O' << o.id << ',' << (o.kind == ObjectKind::Block ? 'B' : 'S')
       << ',' << o.pos.x << ',' << o.pos.y << ',' << o.pos.level << ','
       << heading_name(o.heading) << ',' << (o.folded ? 1 : 0) << ','
       << (o.carried_by ? std::to_string(*o.carried_by) : "-") << ';';
  }
  return os.str();
}

}  // namespace craft::arena
