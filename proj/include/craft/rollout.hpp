#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "craft/arena.hpp"
#include "craft/policy.hpp"
#include "craft/rng.hpp"
#include "craft/types.hpp"

namespace craft::train {

// Start-state distribution hook; default is a fresh init_task draw.
using StartSampler = std::function<WorldState(Rng&)>;

// Domain randomization: executed actions are replaced by Stop with
// probability p_stop (the agent's chosen action is what gets recorded).
struct DrConfig {
  bool enabled = false;
  double p_stop = 0.3;
};

Action dr_wrap(Action action, double p_stop, Rng& rng);

// One synchronous environment instance with auto-reset bookkeeping.
class SyncEnv {
 public:
  SyncEnv(const TaskSpec& spec, StartSampler sampler, uint64_t seed);

  const WorldState& state() const { return state_; }
  const TaskSpec& spec() const { return spec_; }
  Rng& rng() { return rng_; }

  void reset_if_needed();
  // Applies the executed joint action; accumulates episode stats.
  StepResult step(const std::vector<Action>& executed);

  bool needs_reset() const { return needs_reset_; }
  // Episode outcomes recorded since construction.
  const std::vector<double>& episode_rewards(int team) const {
    return episode_rewards_[team];
  }
  const std::vector<bool>& episode_success(int team) const {
    return episode_success_[team];
  }

 private:
  TaskSpec spec_;
  StartSampler sampler_;
  Rng rng_;
  WorldState state_;
  bool needs_reset_ = false;
  std::vector<std::vector<double>> episode_rewards_;
  std::vector<std::vector<bool>> episode_success_;
  std::vector<double> running_reward_;
};

struct EnvStep {
  std::vector<Observation> agent_obs;  // learning-team agents, id order
  Observation joint_obs;
  std::vector<Action> actions;  // agent's chosen actions (pre-DR)
  std::vector<double> log_probs;
  std::vector<ActionMask> masks;
  double team_reward = 0.0;
  double value = 0.0;
  bool done = false;
};

struct RolloutBatch {
  std::vector<std::vector<EnvStep>> envs;  // [env][step]
  std::vector<double> bootstrap_values;    // per env
  size_t agents_per_env = 0;

  size_t env_steps() const {
    size_t n = 0;
    for (const auto& e : envs) n += e.size();
    return n;
  }
  size_t agent_samples() const { return env_steps() * agents_per_env; }
};

struct CollectConfig {
  int steps = 64;           // L, per environment
  int learning_team = 0;
  bool guidance = true;
  DrConfig dr;
  int num_workers = 1;
};

// Steps every environment L times with masked sampling for the learning
// team; frozen opponents act greedily from their snapshots. Environments are
// partitioned across worker threads; each environment owns its RNG stream,
// so the result does not depend on the worker count.
RolloutBatch collect_rollouts(std::vector<SyncEnv>& envs,
                              const std::vector<nn::PolicyParams>& team_params,
                              const CollectConfig& cfg);

StartSampler default_start_sampler(const TaskSpec& spec);

}  // namespace craft::train
