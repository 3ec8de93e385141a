#include "craft/trainer.hpp"

#include <cstdio>
#include <deque>
#include <sstream>

namespace craft::train {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double mean_of(const std::deque<double>& d) {
  if (d.empty()) return 0.0;
  double s = 0.0;
  for (double v : d) s += v;
  return s / static_cast<double>(d.size());
}

double rate_of(const std::deque<bool>& d) {
  if (d.empty()) return 0.0;
  size_t n = 0;
  for (bool v : d) n += v ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(d.size());
}

}  // namespace

TrainResult train(const TaskSpec& spec, const TrainConfig& cfg,
                  StartSampler sampler,
                  const std::vector<nn::PolicyParams>* init) {
  arena::validate_spec(spec);
  if (cfg.num_envs <= 0 || cfg.steps_per_update <= 0 || cfg.total_steps <= 0)
    throw ConfigError("training sizes must be positive");
  if (!sampler) sampler = default_start_sampler(spec);

  const int n_teams = spec.num_teams();
  const bool competitive = spec.mode == TaskMode::Competitive;
  Rng root(cfg.seed);

  std::vector<nn::PolicyParams> team_params;
  if (init) {
    if (static_cast<int>(init->size()) != n_teams)
      throw ConfigError("initial weights cover " +
                        std::to_string(init->size()) + " teams, task has " +
                        std::to_string(n_teams));
    team_params = *init;
  } else {
    for (int t = 0; t < n_teams; ++t) {
      Rng prng = root.split(1000 + static_cast<uint64_t>(t));
      team_params.push_back(nn::make_policy(arena::observation_size(spec),
                                            arena::joint_observation_size(spec),
                                            cfg.net, prng));
    }
  }
  std::vector<PolicyOpt> opts;
  opts.reserve(team_params.size());
  for (const auto& p : team_params) opts.emplace_back(p, cfg.lr);

  std::vector<SyncEnv> envs;
  envs.reserve(cfg.num_envs);
  for (int e = 0; e < cfg.num_envs; ++e) {
    Rng er = root.split(1 + static_cast<uint64_t>(e));
    envs.emplace_back(spec, sampler, er.next_u64());
  }
  Rng update_rng = root.split(500);

  LeagueState league;
  league.threshold = cfg.selfplay_threshold;
  league.window_len = cfg.selfplay_window;

  std::vector<size_t> consumed(envs.size(), 0);
  std::deque<bool> succ_window;
  std::deque<double> rew_window;

  std::ostringstream metrics;
  metrics << "update\tenv_steps\tepisodes\tteam\treward\tsuccess\t"
             "policy_loss\tvalue_loss\tentropy\tclip_frac\n";

  long env_steps = 0;
  long episodes = 0;
  int update = 0;
  const long per_update =
      static_cast<long>(cfg.num_envs) * cfg.steps_per_update;

  while (env_steps < cfg.total_steps) {
    const int team = competitive ? league.active_team() : 0;
    CollectConfig cc;
    cc.steps = cfg.steps_per_update;
    cc.learning_team = team;
    cc.guidance = cfg.guidance;
    cc.dr = cfg.dr;
    cc.num_workers = cfg.num_workers;
    RolloutBatch batch = collect_rollouts(envs, team_params, cc);
    AdvantageSet adv = compute_gae(batch, cfg.gamma, cfg.gae_lambda);
    PpoStats stats =
        ppo_update(batch, adv, team_params[team], opts[team], cfg.ppo,
                   update_rng);
    env_steps += per_update;
    update += 1;

    // Drain newly finished episodes in env-id order so logs are deterministic.
    std::vector<bool> wins;
    for (size_t e = 0; e < envs.size(); ++e) {
      const auto& succ = envs[e].episode_success(team);
      const auto& rews = envs[e].episode_rewards(team);
      for (size_t k = consumed[e]; k < succ.size(); ++k) {
        wins.push_back(succ[k]);
        succ_window.push_back(succ[k]);
        rew_window.push_back(rews[k]);
        episodes += 1;
      }
      consumed[e] = succ.size();
    }
    while (succ_window.size() > cfg.success_window) succ_window.pop_front();
    while (rew_window.size() > cfg.success_window) rew_window.pop_front();
    if (competitive) league = selfplay_step(league, wins);

    metrics << update << '\t' << env_steps << '\t' << episodes << '\t' << team
            << '\t' << fmt(mean_of(rew_window)) << '\t'
            << fmt(rate_of(succ_window)) << '\t' << fmt(stats.policy_loss)
            << '\t' << fmt(stats.value_loss) << '\t' << fmt(stats.entropy)
            << '\t' << fmt(stats.clip_fraction) << '\n';
  }

  TrainResult res;
  res.team_params = std::move(team_params);
  res.metrics = metrics.str();
  res.final_success = rate_of(succ_window);
  res.env_steps = env_steps;
  res.episodes = episodes;
  return res;
}

}  // namespace craft::train
