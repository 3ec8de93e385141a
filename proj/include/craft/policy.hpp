#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "craft/mlp.hpp"
#include "craft/rng.hpp"
#include "craft/types.hpp"

namespace craft::nn {

// Actor/value parameters for one team. Agents on the team share these
// weights; the critic reads the joint observation (centralized critic), the
// actor reads per-agent observations.
struct PolicyParams {
  Mlp actor;   // per-agent observation -> 11 action logits
  Mlp critic;  // joint observation -> scalar value
  int version = 0;
};

struct NetConfig {
  int hidden_layers = 4;
  int hidden_units = 256;
  double policy_head_gain = 0.01;
  double value_head_gain = 1.0;
};

PolicyParams make_policy(int obs_size, int joint_obs_size,
                         const NetConfig& cfg, Rng& rng);

// (per-agent logits, centralized value).
std::pair<std::vector<double>, double> forward(const PolicyParams& params,
                                               const Observation& obs,
                                               const Observation& joint_obs);

// Categorical distribution over the 11 actions with masked entries pinned to
// exactly zero probability. Softmax uses max-subtraction over the allowed
// entries.
struct MaskedDistribution {
  std::array<double, kNumActions> probs{};
  std::array<double, kNumActions> logits{};
  ActionMask mask;

  static MaskedDistribution from_logits(const std::vector<double>& logits,
                                        const ActionMask& mask);
  double log_prob(Action a) const;
  double entropy() const;
};

struct SampleResult {
  Action action = Action::Stop;
  double log_prob = 0.0;
  double entropy = 0.0;
};

SampleResult sample_masked(const std::vector<double>& logits,
                           const ActionMask& mask, Rng& rng);

Action argmax_masked(const std::vector<double>& logits, const ActionMask& mask);

// Checkpoint layout: magic "CRAFTCKP", u32 format version, u32 params
// version, u32 network count (2: actor, critic); per network u32 layer-size
// count, u32 sizes, then row-major float32 parameters.
void save_checkpoint(const std::string& path, const PolicyParams& params);
PolicyParams load_checkpoint(const std::string& path);
// Throws ConfigError when the checkpoint does not fit the observation sizes.
void validate_shapes(const PolicyParams& params, int obs_size,
                     int joint_obs_size);

}  // namespace craft::nn
