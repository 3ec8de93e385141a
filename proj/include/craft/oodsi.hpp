#pragma once

#include <string>
#include <vector>

#include "craft/async_arena.hpp"
#include "craft/eval.hpp"
#include "craft/trainer.hpp"

namespace craft::oodsi {

struct HarvestedState {
  WorldState state;
  uint64_t traj_id = 0;
  int segment = -1;
  double time = 0.0;  // decision timestamp within the source trajectory
};

struct StartStateSet {
  std::vector<HarvestedState> states;
  double p_ood = 0.5;
};

// Runs async episodes under the given policy snapshot. Acting is stochastic
// (masked sampling) by default to diversify coverage; greedy is opt-in.
std::vector<async::Trajectory> collect_ood_trajectories(
    const std::vector<nn::PolicyParams>& team_params, const TaskSpec& spec,
    const async::DurationModel& model, int episodes, uint64_t seed,
    bool guidance = true, bool greedy = false);

// Uniformly picks n_traj usable trajectories (length >= n_segments), splits
// each record sequence into n_segments contiguous near-equal parts (remainder
// spread over the leading parts) and harvests the first state of each part.
StartStateSet build_start_state_set(
    const std::vector<async::Trajectory>& trajectories, int n_traj,
    int n_segments, Rng& rng);

// Mixture draw: with probability set.p_ood a uniform harvested state (step
// count reset), otherwise a fresh draw from the base initializer.
WorldState sample_start_state(const StartStateSet& set,
                              const train::StartSampler& base_rho0, Rng& rng);

train::StartSampler mixed_sampler(StartStateSet set,
                                  train::StartSampler base_rho0);

// Serialization: trajectory record format plus a provenance header per state.
std::string start_state_set_to_text(const StartStateSet& set);
StartStateSet start_state_set_from_text(const std::string& text);
void save_start_state_set(const std::string& path, const StartStateSet& set);
StartStateSet load_start_state_set(const std::string& path);

struct PipelineConfig {
  TaskSpec spec;
  async::DurationModel model;
  train::TrainConfig phase1;
  train::TrainConfig phase4;  // total_steps == 0 skips the retrain
  int collect_episodes = 10;
  int n_traj = 3;
  int n_segments = 5;
  double p_ood = 0.5;
  int eval_episodes = 100;
  bool greedy_collect = false;
  bool retrain_from_scratch = false;
  uint64_t seed = 0;
};

struct PipelineResult {
  std::vector<nn::PolicyParams> phase1_params;
  std::vector<nn::PolicyParams> final_params;
  StartStateSet start_set;
  std::string report;  // phase / environment / episodes / success / reward
  double phase1_sync = 0.0, phase1_async = 0.0;
  double phase4_sync = 0.0, phase4_async = 0.0;
};

// Algorithm: train in the sync arena, collect async trajectories, harvest
// start states, retrain with the mixed start distribution. Phase failures
// abort with the phase label.
PipelineResult oodsi_pipeline(const PipelineConfig& cfg);

}  // namespace craft::oodsi
