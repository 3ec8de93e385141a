#include "craft/gae.hpp"

namespace craft::train {

AdvantageSet compute_gae(const RolloutBatch& batch, double gamma,
                         double lambda) {
  AdvantageSet out;
  out.advantages.resize(batch.envs.size());
  out.returns.resize(batch.envs.size());
  for (size_t e = 0; e < batch.envs.size(); ++e) {
    const auto& steps = batch.envs[e];
    const int n = static_cast<int>(steps.size());
    out.advantages[e].assign(n, 0.0);
    out.returns[e].assign(n, 0.0);
    double next_adv = 0.0;
    double next_value = batch.bootstrap_values[e];
    for (int t = n - 1; t >= 0; --t) {
      const double not_done = steps[t].done ? 0.0 : 1.0;
      const double delta =
          steps[t].team_reward + gamma * next_value * not_done - steps[t].value;
      next_adv = delta + gamma * lambda * not_done * next_adv;
      out.advantages[e][t] = next_adv;
      out.returns[e][t] = next_adv + steps[t].value;
      next_value = steps[t].value;
    }
  }
  return out;
}

}  // namespace craft::train
