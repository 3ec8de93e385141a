#include "craft/rollout.hpp"

#include <thread>

namespace craft::train {

Action dr_wrap(Action action, double p_stop, Rng& rng) {
  if (p_stop < 0.0 || p_stop > 1.0)
    throw ContractError("p_stop must be in [0, 1]");
  return rng.uniform() < p_stop ? Action::Stop : action;
}

SyncEnv::SyncEnv(const TaskSpec& spec, StartSampler sampler, uint64_t seed)
    : spec_(spec), sampler_(std::move(sampler)), rng_(seed) {
  episode_rewards_.resize(spec_.num_teams());
  episode_success_.resize(spec_.num_teams());
  running_reward_.resize(spec_.num_teams(), 0.0);
  state_ = sampler_(rng_);
}

void SyncEnv::reset_if_needed() {
  if (!needs_reset_) return;
  state_ = sampler_(rng_);
  needs_reset_ = false;
  std::fill(running_reward_.begin(), running_reward_.end(), 0.0);
}

StepResult SyncEnv::step(const std::vector<Action>& executed) {
  StepResult res = arena::step_sync(state_, spec_, executed);
  state_ = res.state;
  for (size_t t = 0; t < res.team_rewards.size(); ++t)
    running_reward_[t] += res.team_rewards[t];
  if (res.done) {
    int w = arena::winning_team(state_, spec_);
    for (int t = 0; t < spec_.num_teams(); ++t) {
      episode_rewards_[t].push_back(running_reward_[t]);
      episode_success_[t].push_back(w == t);
    }
    needs_reset_ = true;
  }
  return res;
}

StartSampler default_start_sampler(const TaskSpec& spec) {
  return [spec](Rng& rng) {
    return arena::init_task(spec, rng.next_u64());
  };
}

namespace {

void collect_range(std::vector<SyncEnv>& envs, size_t begin, size_t end,
                   const std::vector<nn::PolicyParams>& team_params,
                   const CollectConfig& cfg, RolloutBatch& batch) {
  for (size_t e = begin; e < end; ++e) {
    try {
    SyncEnv& env = envs[e];
    auto& steps = batch.envs[e];
    steps.reserve(cfg.steps);
    for (int t = 0; t < cfg.steps; ++t) {
      env.reset_if_needed();
      const WorldState& s = env.state();
      const TaskSpec& spec = env.spec();
      EnvStep rec;
      rec.joint_obs = arena::observe_joint(s);
      rec.value = team_params[cfg.learning_team].critic.forward(rec.joint_obs)[0];

      std::vector<Action> executed(s.robots.size(), Action::Stop);
      for (const auto& r : s.robots) {
        ActionMask mask = arena::legal_action_mask(s, spec, r.id);
        if (cfg.guidance) mask = arena::guided_action_mask(s, spec, r.id, mask);
        Observation obs = arena::observe(s, r.id);
        std::vector<double> logits = team_params[r.team].actor.forward(obs);
        Action chosen;
        if (r.team == cfg.learning_team) {
          nn::SampleResult sr = nn::sample_masked(logits, mask, env.rng());
          chosen = sr.action;
          rec.agent_obs.push_back(std::move(obs));
          rec.actions.push_back(sr.action);
          rec.log_probs.push_back(sr.log_prob);
          rec.masks.push_back(mask);
        } else {
          chosen = nn::argmax_masked(logits, mask);
        }
        Action final = cfg.dr.enabled
                           ? dr_wrap(chosen, cfg.dr.p_stop, env.rng())
                           : chosen;
        executed[r.id] = final;
      }

      StepResult res = env.step(executed);
      rec.team_reward = res.team_rewards[cfg.learning_team];
      rec.done = res.done;
      steps.push_back(std::move(rec));
    }
    batch.bootstrap_values[e] =
        env.needs_reset()
            ? 0.0
            : team_params[cfg.learning_team]
                  .critic.forward(arena::observe_joint(env.state()))[0];
    } catch (const std::exception& ex) {
      throw ContractError("env " + std::to_string(e) + ": " + ex.what());
    }
  }
}

}  // namespace

RolloutBatch collect_rollouts(std::vector<SyncEnv>& envs,
                              const std::vector<nn::PolicyParams>& team_params,
                              const CollectConfig& cfg) {
  RolloutBatch batch;
  batch.envs.resize(envs.size());
  batch.bootstrap_values.resize(envs.size(), 0.0);
  if (!envs.empty()) {
    int team = cfg.learning_team;
    size_t n = 0;
    for (const auto& r : envs[0].spec().robots)
      if (r.team == team) ++n;
    batch.agents_per_env = n;
  }
  if (cfg.steps <= 0) return batch;

  int workers = std::max(1, cfg.num_workers);
  workers = std::min<int>(workers, static_cast<int>(envs.size()));
  if (workers <= 1) {
    collect_range(envs, 0, envs.size(), team_params, cfg, batch);
    return batch;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  size_t per = (envs.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    size_t begin = w * per;
    size_t end = std::min(envs.size(), begin + per);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        collect_range(envs, begin, end, team_params, cfg, batch);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return batch;
}

}  // namespace craft::train
