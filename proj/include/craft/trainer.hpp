#pragma once

#include <string>

#include "craft/gae.hpp"
#include "craft/league.hpp"
#include "craft/ppo.hpp"
#include "craft/rollout.hpp"

namespace craft::train {

struct TrainConfig {
  long total_steps = 200000;  // environment steps across all envs
  int num_envs = 8;
  int steps_per_update = 128;  // L, per env per update
  int num_workers = 1;
  bool guidance = true;
  DrConfig dr;
  double gamma = 0.95;
  double gae_lambda = 0.95;
  double lr = 1e-5;
  PpoConfig ppo;
  nn::NetConfig net;
  uint64_t seed = 0;
  double selfplay_threshold = 0.55;
  size_t selfplay_window = 100;
  size_t success_window = 100;  // metrics reporting window
};

struct TrainResult {
  std::vector<nn::PolicyParams> team_params;
  std::string metrics;  // tab-delimited table, one row per update
  double final_success = 0.0;
  long env_steps = 0;
  long episodes = 0;
};

// Trains with PPO under CTDE. Cooperative tasks train the single team;
// competitive tasks run the self-play pause protocol over both teams.
// `sampler` overrides the start-state distribution (OODSI mixing); `init`
// continues from existing weights instead of a fresh initialization.
TrainResult train(const TaskSpec& spec, const TrainConfig& cfg,
                  StartSampler sampler = nullptr,
                  const std::vector<nn::PolicyParams>* init = nullptr);

}  // namespace craft::train
