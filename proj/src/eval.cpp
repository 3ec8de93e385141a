#include "craft/eval.hpp"

namespace craft::eval {

async::Policy greedy_policy(const std::vector<nn::PolicyParams>& team_params,
                            const TaskSpec& spec, bool guidance) {
  return [&team_params, spec, guidance](const WorldState& s, int agent,
                                        const ActionMask& legal) {
    ActionMask mask = legal;
    if (guidance) mask = arena::guided_action_mask(s, spec, agent, mask);
    const RobotState& r = s.robot(agent);
    std::vector<double> logits =
        team_params[r.team].actor.forward(arena::observe(s, agent));
    return nn::argmax_masked(logits, mask);
  };
}

async::Policy sampled_policy(const std::vector<nn::PolicyParams>& team_params,
                             const TaskSpec& spec, bool guidance, Rng& rng) {
  return [&team_params, spec, guidance, &rng](const WorldState& s, int agent,
                                              const ActionMask& legal) {
    ActionMask mask = legal;
    if (guidance) mask = arena::guided_action_mask(s, spec, agent, mask);
    const RobotState& r = s.robot(agent);
    std::vector<double> logits =
        team_params[r.team].actor.forward(arena::observe(s, agent));
    return nn::sample_masked(logits, mask, rng).action;
  };
}

EvalResult evaluate_sync(const std::vector<nn::PolicyParams>& team_params,
                         const TaskSpec& spec, const EvalConfig& cfg,
                         train::StartSampler sampler) {
  arena::validate_spec(spec);
  if (cfg.episodes <= 0) throw ConfigError("episodes must be positive");
  if (static_cast<int>(team_params.size()) != spec.num_teams())
    throw ConfigError("policy count does not match team count");
  if (!sampler) sampler = train::default_start_sampler(spec);

  const int n_teams = spec.num_teams();
  EvalResult res;
  res.episodes = cfg.episodes;
  res.team_success.assign(n_teams, 0.0);
  res.team_reward.assign(n_teams, 0.0);
  Rng root(cfg.seed);
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    Rng rng = root.split(static_cast<uint64_t>(ep));
    WorldState s = sampler(rng);
    Rng act_rng = rng.split(1);
    async::Policy policy =
        cfg.greedy ? greedy_policy(team_params, spec, cfg.guidance)
                   : sampled_policy(team_params, spec, cfg.guidance, act_rng);
    std::vector<double> total(n_teams, 0.0);
    while (!arena::is_done(s, spec)) {
      std::vector<Action> joint(s.robots.size(), Action::Stop);
      for (const auto& r : s.robots)
        joint[r.id] = policy(s, r.id, arena::legal_action_mask(s, spec, r.id));
      StepResult sr = arena::step_sync(s, spec, joint);
      s = sr.state;
      for (int t = 0; t < n_teams; ++t) total[t] += sr.team_rewards[t];
      if (sr.done) break;
    }
    const int w = arena::winning_team(s, spec);
    for (int t = 0; t < n_teams; ++t) {
      if (w == t) res.team_success[t] += 1.0;
      res.team_reward[t] += total[t];
    }
  }
  for (int t = 0; t < n_teams; ++t) {
    res.team_success[t] /= cfg.episodes;
    res.team_reward[t] /= cfg.episodes;
  }
  res.success_rate = res.team_success[0];
  res.mean_reward = res.team_reward[0];
  return res;
}

EvalResult evaluate_async(const std::vector<nn::PolicyParams>& team_params,
                          const TaskSpec& spec,
                          const async::DurationModel& model,
                          const EvalConfig& cfg,
                          train::StartSampler sampler) {
  arena::validate_spec(spec);
  if (cfg.episodes <= 0) throw ConfigError("episodes must be positive");
  if (static_cast<int>(team_params.size()) != spec.num_teams())
    throw ConfigError("policy count does not match team count");
  if (!sampler) sampler = train::default_start_sampler(spec);

  const int n_teams = spec.num_teams();
  EvalResult res;
  res.episodes = cfg.episodes;
  res.team_success.assign(n_teams, 0.0);
  res.team_reward.assign(n_teams, 0.0);
  Rng root(cfg.seed);
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    Rng rng = root.split(static_cast<uint64_t>(ep));
    WorldState s = sampler(rng);
    Rng act_rng = rng.split(1);
    async::Policy policy =
        cfg.greedy ? greedy_policy(team_params, spec, cfg.guidance)
                   : sampled_policy(team_params, spec, cfg.guidance, act_rng);
    async::Trajectory traj =
        async::run_async_episode(policy, s, model, spec, rng.next_u64());
    for (const auto& rec : traj.records)
      for (int t = 0; t < n_teams; ++t) res.team_reward[t] += rec.team_rewards[t];
    if (traj.success && traj.outcome_team >= 0)
      res.team_success[traj.outcome_team] += 1.0;
  }
  for (int t = 0; t < n_teams; ++t) {
    res.team_success[t] /= cfg.episodes;
    res.team_reward[t] /= cfg.episodes;
  }
  res.success_rate = res.team_success[0];
  res.mean_reward = res.team_reward[0];
  return res;
}

}  // namespace craft::eval
