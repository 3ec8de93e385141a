#pragma once

#include "craft/gae.hpp"
#include "craft/optim.hpp"
#include "craft/policy.hpp"
#include "craft/rollout.hpp"

namespace craft::train {

struct PpoConfig {
  double clip_eps = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int epochs = 4;
  int minibatch = 4096;  // in environment steps
  double max_grad_norm = 0.5;
};

struct PpoStats {
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double policy_loss = 0.0;
  double grad_norm = 0.0;  // pre-clip, last minibatch
};

// Adam state for one policy (actor + critic vectors).
struct PolicyOpt {
  nn::OptState actor;
  nn::OptState critic;

  PolicyOpt() = default;
  PolicyOpt(const nn::PolicyParams& p, double lr)
      : actor(p.actor.param_count(), lr),
        critic(p.critic.param_count(), lr) {}
};

// Scalar PPO composite loss of the batch under `params` (clipped surrogate +
// value MSE + entropy bonus). Pure function; the finite-difference oracle in
// the tests differentiates exactly this.
double ppo_loss(const nn::PolicyParams& params, const RolloutBatch& batch,
                const AdvantageSet& adv, const PpoConfig& cfg);

// Analytic gradients of ppo_loss for every parameter of actor and critic.
struct PpoGrads {
  std::vector<double> actor;
  std::vector<double> critic;
};
PpoGrads ppo_loss_backward(const nn::PolicyParams& params,
                           const RolloutBatch& batch, const AdvantageSet& adv,
                           const PpoConfig& cfg, PpoStats* stats = nullptr);

// Minibatched PPO update over the stated epochs. Advantages are normalized
// to zero mean / unit variance across the whole update. Gradient norm is
// clipped globally (actor and critic jointly) before each Adam step.
PpoStats ppo_update(const RolloutBatch& batch, const AdvantageSet& adv,
                    nn::PolicyParams& params, PolicyOpt& opt,
                    const PpoConfig& cfg, Rng& rng);

}  // namespace craft::train
