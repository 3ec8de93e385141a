#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "craft/async_arena.hpp"
#include "craft/oodsi.hpp"
#include "craft/trainer.hpp"
#include "craft/types.hpp"

namespace craft::cli {

// Experiment configuration backing every CLI command. JSON keys match the
// field names; unknown keys are rejected.
struct ExperimentConfig {
  std::string task = "coop_mini";
  bool guidance = true;
  bool dr = false;
  double p_stop = 0.3;
  bool oodsi = false;
  int n_traj = 3;
  int n_segments = 5;
  double p_ood = 0.5;
  std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
  long train_steps = 200000;
  long retrain_steps = 0;  // 0: same budget as train_steps
  int eval_episodes = 100;
  std::string out_dir = "out";

  double learning_rate = 0.00001;
  int batch = 4096;
  double discount = 0.95;
  double gae_lambda = 0.95;
  int max_episode_step = 500;

  double clip_eps = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int epochs = 4;
  int hidden_layers = 4;
  int hidden_units = 256;

  int num_envs = 8;
  int steps_per_update = 128;
  int num_workers = 1;
  int collect_episodes = 10;

  async::DurationModel duration;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

TaskSpec task_of(const ExperimentConfig& cfg);
train::TrainConfig to_train_config(const ExperimentConfig& cfg, uint64_t seed);
oodsi::PipelineConfig to_pipeline_config(const ExperimentConfig& cfg,
                                         uint64_t seed);

std::string method_label(const ExperimentConfig& cfg);  // PPO / PPO+DR / ...

}  // namespace craft::cli
