#include "craft/ppo.hpp"

#include <algorithm>
#include <cmath>

namespace craft::train {

namespace {

struct StepIndex {
  size_t env;
  size_t step;
};

std::vector<StepIndex> all_indices(const RolloutBatch& batch) {
  std::vector<StepIndex> idx;
  idx.reserve(batch.env_steps());
  for (size_t e = 0; e < batch.envs.size(); ++e)
    for (size_t t = 0; t < batch.envs[e].size(); ++t) idx.push_back({e, t});
  return idx;
}

size_t count_agents(const RolloutBatch& batch,
                    const std::vector<StepIndex>& idx) {
  size_t n = 0;
  for (const auto& i : idx) n += batch.envs[i.env][i.step].actions.size();
  return n;
}

double loss_core(const nn::PolicyParams& params, const RolloutBatch& batch,
                 const AdvantageSet& adv, const PpoConfig& cfg,
                 const std::vector<StepIndex>& idx, PpoGrads* grads,
                 PpoStats* stats) {
  const size_t n_steps = idx.size();
  const size_t n_agents = count_agents(batch, idx);
  if (n_steps == 0 || n_agents == 0) return 0.0;

  if (grads) {
    grads->actor.assign(params.actor.param_count(), 0.0);
    grads->critic.assign(params.critic.param_count(), 0.0);
  }

  double policy_loss = 0.0, value_mse = 0.0, entropy_sum = 0.0;
  double ratio_sum = 0.0;
  size_t clipped = 0;

  nn::Mlp::Cache cache;
  for (const auto& i : idx) {
    const EnvStep& st = batch.envs[i.env][i.step];
    const double A = adv.advantages[i.env][i.step];
    const double R = adv.returns[i.env][i.step];

    const std::vector<double> vout = params.critic.forward(st.joint_obs, cache);
    const double v = vout[0];
    value_mse += (v - R) * (v - R);
    if (grads) {
      std::vector<double> dv{cfg.value_coef * 2.0 * (v - R) /
                             static_cast<double>(n_steps)};
      params.critic.backward(st.joint_obs, cache, dv, grads->critic);
    }

    for (size_t j = 0; j < st.actions.size(); ++j) {
      const std::vector<double> logits =
          params.actor.forward(st.agent_obs[j], cache);
      nn::MaskedDistribution dist =
          nn::MaskedDistribution::from_logits(logits, st.masks[j]);
      const double new_lp = dist.log_prob(st.actions[j]);
      const double ratio = std::exp(new_lp - st.log_probs[j]);
      const double surr1 = ratio * A;
      const double surr2 =
          std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * A;
      const double h = dist.entropy();
      policy_loss += -std::min(surr1, surr2) - cfg.entropy_coef * h;
      entropy_sum += h;
      ratio_sum += ratio;
      if (ratio < 1.0 - cfg.clip_eps || ratio > 1.0 + cfg.clip_eps) ++clipped;

      if (grads) {
        const bool clipped_out = (A > 0.0 && ratio >= 1.0 + cfg.clip_eps) ||
                                 (A < 0.0 && ratio <= 1.0 - cfg.clip_eps);
        const double g_logp = clipped_out ? 0.0 : -ratio * A;
        std::vector<double> dlogits(kNumActions, 0.0);
        const int a_idx = static_cast<int>(st.actions[j]);
        for (int k = 0; k < kNumActions; ++k) {
          if (!dist.mask.allowed[k]) continue;
          const double p = dist.probs[k];
          double d = g_logp * ((k == a_idx ? 1.0 : 0.0) - p);
          if (p > 0.0)
            d += cfg.entropy_coef * p * (std::log(p) + h);
          dlogits[k] = d / static_cast<double>(n_agents);
        }
        params.actor.backward(st.agent_obs[j], cache, dlogits, grads->actor);
      }
    }
  }

  const double loss = policy_loss / static_cast<double>(n_agents) +
                      cfg.value_coef * value_mse / static_cast<double>(n_steps);
  if (stats) {
    stats->mean_ratio = ratio_sum / static_cast<double>(n_agents);
    stats->clip_fraction =
        static_cast<double>(clipped) / static_cast<double>(n_agents);
    stats->value_loss = value_mse / static_cast<double>(n_steps);
    stats->entropy = entropy_sum / static_cast<double>(n_agents);
    stats->policy_loss = policy_loss / static_cast<double>(n_agents);
  }
  return loss;
}

}  // namespace

double ppo_loss(const nn::PolicyParams& params, const RolloutBatch& batch,
                const AdvantageSet& adv, const PpoConfig& cfg) {
  return loss_core(params, batch, adv, cfg, all_indices(batch), nullptr,
                   nullptr);
}

PpoGrads ppo_loss_backward(const nn::PolicyParams& params,
                           const RolloutBatch& batch, const AdvantageSet& adv,
                           const PpoConfig& cfg, PpoStats* stats) {
  PpoGrads g;
  loss_core(params, batch, adv, cfg, all_indices(batch), &g, stats);
  return g;
}

PpoStats ppo_update(const RolloutBatch& batch, const AdvantageSet& adv,
                    nn::PolicyParams& params, PolicyOpt& opt,
                    const PpoConfig& cfg, Rng& rng) {
  std::vector<StepIndex> idx = all_indices(batch);
  if (idx.empty()) return {};

  // Normalize advantages across the whole update.
  double mean = 0.0;
  for (const auto& i : idx) mean += adv.advantages[i.env][i.step];
  mean /= static_cast<double>(idx.size());
  double var = 0.0;
  for (const auto& i : idx) {
    const double d = adv.advantages[i.env][i.step] - mean;
    var += d * d;
  }
  const double stddev = std::sqrt(var / static_cast<double>(idx.size()));
  AdvantageSet norm = adv;
  for (const auto& i : idx)
    norm.advantages[i.env][i.step] =
        (adv.advantages[i.env][i.step] - mean) / (stddev + 1e-8);

  const size_t mb = std::max<size_t>(1, static_cast<size_t>(cfg.minibatch));
  PpoStats agg;
  size_t n_batches = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(idx);
    for (size_t off = 0; off < idx.size(); off += mb) {
      std::vector<StepIndex> slice(
          idx.begin() + off,
          idx.begin() + std::min(idx.size(), off + mb));
      PpoGrads grads;
      PpoStats s;
      const double loss =
          loss_core(params, batch, norm, cfg, slice, &grads, &s);
      if (!std::isfinite(loss))
        throw NumericError("non-finite PPO loss in minibatch " +
                           std::to_string(n_batches) + " of epoch " +
                           std::to_string(epoch));

      // Global norm over both networks, clipped jointly.
      double sq = 0.0;
      for (double g : grads.actor) sq += g * g;
      for (double g : grads.critic) sq += g * g;
      const double gnorm = std::sqrt(sq);
      if (gnorm > cfg.max_grad_norm && gnorm > 0.0) {
        const double scale = cfg.max_grad_norm / gnorm;
        for (double& g : grads.actor) g *= scale;
        for (double& g : grads.critic) g *= scale;
      }
      nn::adam_step(params.actor.params(), grads.actor, opt.actor);
      nn::adam_step(params.critic.params(), grads.critic, opt.critic);

      agg.mean_ratio += s.mean_ratio;
      agg.clip_fraction += s.clip_fraction;
      agg.value_loss += s.value_loss;
      agg.entropy += s.entropy;
      agg.policy_loss += s.policy_loss;
      agg.grad_norm = gnorm;
      ++n_batches;
    }
  }
  if (n_batches > 0) {
    const double inv = 1.0 / static_cast<double>(n_batches);
    agg.mean_ratio *= inv;
    agg.clip_fraction *= inv;
    agg.value_loss *= inv;
    agg.entropy *= inv;
    agg.policy_loss *= inv;
  }
  params.version += 1;
  return agg;
}

}  // namespace craft::train
