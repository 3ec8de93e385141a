#pragma once

#include "craft/async_arena.hpp"
#include "craft/policy.hpp"
#include "craft/rollout.hpp"

namespace craft::eval {

struct EvalConfig {
  int episodes = 100;
  bool guidance = true;
  // Stochastic decentralized execution by default: actions are sampled from
  // the masked policy distribution, matching the training-time behavior.
  bool greedy = false;
  uint64_t seed = 0;
};

struct EvalResult {
  int episodes = 0;
  std::vector<double> team_success;  // fraction of episodes won, per team
  std::vector<double> team_reward;   // mean accumulated reward, per team
  double success_rate = 0.0;         // team 0
  double mean_reward = 0.0;          // team 0
};

// Greedy decentralized execution: every robot takes the argmax of its team's
// actor under the legality mask (optionally narrowed by guidance).
async::Policy greedy_policy(const std::vector<nn::PolicyParams>& team_params,
                            const TaskSpec& spec, bool guidance);

// Stochastic counterpart: draws from the masked categorical; `rng` must
// outlive the returned policy.
async::Policy sampled_policy(const std::vector<nn::PolicyParams>& team_params,
                             const TaskSpec& spec, bool guidance, Rng& rng);

EvalResult evaluate_sync(const std::vector<nn::PolicyParams>& team_params,
                         const TaskSpec& spec, const EvalConfig& cfg,
                         train::StartSampler sampler = nullptr);

EvalResult evaluate_async(const std::vector<nn::PolicyParams>& team_params,
                          const TaskSpec& spec,
                          const async::DurationModel& model,
                          const EvalConfig& cfg,
                          train::StartSampler sampler = nullptr);

}  // namespace craft::eval
