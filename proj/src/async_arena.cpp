#include "craft/async_arena.hpp"

#include <algorithm>
#include <map>

namespace craft::async {

double DurationModel::base(Action prev, Action cur) const {
  switch (cur) {
    case Action::MoveForward:
    case Action::MoveBack:
      return prev == cur ? straight_continue : straight_start;
    case Action::MoveLeft:
    case Action::MoveRight:
      return lateral;
    case Action::TurnLeft:
    case Action::TurnRight:
      return turn;
    case Action::Lift:
    case Action::Drop:
      return lift_drop;
    case Action::Fold:
    case Action::Unfold:
      return fold_unfold;
    case Action::Stop:
      return stop;
  }
  return straight_start;
}

double DurationModel::mean_step_duration() const {
  return (straight_continue + straight_start + lateral + turn + lift_drop +
          fold_unfold + stop) /
         7.0;
}

double duration_of(const DurationModel& model, Action prev, Action cur,
                   const DurationContext& ctx, Rng& rng) {
  double d = model.base(prev, cur);
  if (ctx.carrying) d *= model.carry_factor;
  if (ctx.on_slope) d *= model.slope_factor;
  if (model.jitter > 0.0)
    d *= 1.0 + rng.uniform(-model.jitter, model.jitter);
  return d;
}

WorldState project(const std::vector<AsyncEvent>& in_flight,
                   const WorldState& base) {
  for (const auto& ev : in_flight) base.robot(ev.robot);  // id check
  // The authoritative state already keeps every robot at its last completed
  // cell; in-flight actions have no visible effect until they finish.
  return base;
}

bool detect_ood(const WorldState& state, const SignatureSet& sync_visited) {
  return sync_visited.find(arena::signature(state)) == sync_visited.end();
}

Trajectory run_async_episode(const Policy& policy, const WorldState& start,
                             const DurationModel& model, const TaskSpec& spec,
                             uint64_t seed) {
  Trajectory traj;
  traj.id = seed;
  Rng rng(seed);

  WorldState world = start;
  const size_t n = world.robots.size();
  const double t_end = spec.horizon * model.mean_step_duration();

  struct InFlight {
    Action action = Action::Stop;
    double finish = 0.0;
    size_t record = SIZE_MAX;  // decision record that chose this action
  };
  std::vector<InFlight> flight(n);
  std::vector<Action> prev_action(n, Action::Stop);
  std::vector<bool> active(n, false);
  std::vector<double> pending_rewards(spec.num_teams(), 0.0);

  auto in_flight_snapshot = [&]() {
    std::vector<Action> v(n, Action::Stop);
    for (size_t i = 0; i < n; ++i)
      if (active[i]) v[i] = flight[i].action;
    return v;
  };

  auto decide = [&](size_t i, double now) {
    ActionMask mask = arena::legal_action_mask(world, spec, world.robots[i].id);
    TrajRecord rec;
    rec.time = now;
    rec.deciding_robot = world.robots[i].id;
    rec.state = world;
    rec.in_flight = in_flight_snapshot();
    rec.team_rewards = pending_rewards;
    std::fill(pending_rewards.begin(), pending_rewards.end(), 0.0);
    uint16_t bits = 0;
    for (int a = 0; a < kNumActions; ++a)
      if (mask.allowed[a]) bits |= static_cast<uint16_t>(1u << a);
    rec.mask_bits = bits;

    Action a = policy(world, world.robots[i].id, mask);
    if (!mask[a]) {
      a = Action::Stop;
      rec.replaced = true;
    }
    const RobotState& r = world.robots[i];
    DurationContext ctx{r.carrying.has_value(), r.in_slope};
    double dur = duration_of(model, prev_action[i], a, ctx, rng);
    flight[i] = {a, now + dur, traj.records.size()};
    active[i] = true;
    traj.records.push_back(std::move(rec));
  };

  // All robots request their first action at t = 0.
  for (size_t i = 0; i < n; ++i) decide(i, 0.0);

  double now = 0.0;
  bool done = false;
  while (!done) {
    // Next completion instant; completions sharing it apply as one batch.
    double t_next = t_end + 1.0;
    for (size_t i = 0; i < n; ++i)
      if (active[i]) t_next = std::min(t_next, flight[i].finish);
    if (t_next > t_end) break;
    now = t_next;

    std::vector<std::pair<int, Action>> acts;
    std::vector<size_t> batch;
    for (size_t i = 0; i < n; ++i) {
      if (active[i] && flight[i].finish == t_next) {
        acts.emplace_back(static_cast<int>(i), flight[i].action);
        batch.push_back(i);
        active[i] = false;
      }
    }

    WorldState prev = world;
    std::vector<bool> replaced = arena::apply_joint_actions(world, spec, acts);
    world.step_count = prev.step_count + 1;
    world.progress = arena::compute_progress(world, spec);
    std::vector<double> r = arena::reward(prev, world, spec);
    for (size_t t = 0; t < r.size(); ++t) pending_rewards[t] += r[t];
    for (size_t k = 0; k < batch.size(); ++k) {
      prev_action[batch[k]] = acts[k].second;
      if (replaced[k] && flight[batch[k]].record != SIZE_MAX)
        traj.records[flight[batch[k]].record].replaced = true;
    }

    if (arena::winning_team(world, spec) >= 0) {
      done = true;
      break;
    }
    for (size_t i : batch) decide(i, now);
  }

  TrajRecord terminal;
  terminal.time = done ? now : t_end;
  terminal.deciding_robot = -1;
  terminal.state = world;
  terminal.in_flight = in_flight_snapshot();
  terminal.team_rewards = pending_rewards;
  traj.records.push_back(std::move(terminal));

  traj.outcome_team = arena::winning_team(world, spec);
  traj.success = traj.outcome_team >= 0;
  return traj;
}

}  // namespace craft::async
