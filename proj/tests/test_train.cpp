#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "craft/eval.hpp"
#include "craft/gae.hpp"
#include "craft/league.hpp"
#include "craft/ppo.hpp"
#include "craft/presets.hpp"
#include "craft/rollout.hpp"
#include "craft/trainer.hpp"

using namespace craft;

namespace {

// Independent GAE oracle: direct truncated sum of (gamma*lambda)^l * delta,
// cut at episode boundaries, instead of the backward recursion.
std::vector<double> gae_oracle(const std::vector<double>& rewards,
                               const std::vector<double>& values,
                               const std::vector<bool>& dones, double bootstrap,
                               double gamma, double lambda) {
  const size_t T = rewards.size();
  auto next_value = [&](size_t t) {
    if (dones[t]) return 0.0;
    return t + 1 < T ? values[t + 1] : bootstrap;
  };
  std::vector<double> adv(T, 0.0);
  for (size_t t = 0; t < T; ++t) {
    double coef = 1.0;
    for (size_t l = t; l < T; ++l) {
      double delta = rewards[l] + gamma * next_value(l) - values[l];
      adv[t] += coef * delta;
      if (dones[l]) break;
      coef *= gamma * lambda;
    }
  }
  return adv;
}

train::RolloutBatch random_batch(Rng& rng, int num_envs, int steps) {
  train::RolloutBatch b;
  b.agents_per_env = 1;
  b.envs.resize(num_envs);
  for (auto& env : b.envs) {
    env.resize(steps);
    for (auto& s : env) {
      s.team_reward = rng.uniform(-1.0, 1.0);
      s.value = rng.uniform(-1.0, 1.0);
      s.done = rng.uniform() < 0.15;
    }
    b.bootstrap_values.push_back(rng.uniform(-1.0, 1.0));
  }
  return b;
}

std::vector<train::SyncEnv> make_envs(const TaskSpec& spec, int n,
                                      uint64_t seed) {
  std::vector<train::SyncEnv> envs;
  Rng root(seed);
  for (int e = 0; e < n; ++e)
    envs.emplace_back(spec, train::default_start_sampler(spec),
                      root.split(1 + e).next_u64());
  return envs;
}

}  // namespace

TEST_CASE("compute_gae matches the direct-sum oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    int T = 1 + static_cast<int>(rng.uniform_int(40));
    train::RolloutBatch b = random_batch(rng, 3, T);
    train::AdvantageSet got = train::compute_gae(b, 0.95, 0.95);
    REQUIRE(got.advantages.size() == 3);
    for (int e = 0; e < 3; ++e) {
      std::vector<double> r, v;
      std::vector<bool> d;
      for (const auto& s : b.envs[e]) {
        r.push_back(s.team_reward);
        v.push_back(s.value);
        d.push_back(s.done);
      }
      std::vector<double> want =
          gae_oracle(r, v, d, b.bootstrap_values[e], 0.95, 0.95);
      REQUIRE(got.advantages[e].size() == want.size());
      for (int t = 0; t < T; ++t) {
        CHECK(std::abs(got.advantages[e][t] - want[t]) < 1e-8);
        CHECK(std::abs(got.returns[e][t] - (want[t] + v[t])) < 1e-12);
      }
    }
  }
}

TEST_CASE("dr_wrap stop frequency") {
  Rng rng(123);
  int stops = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (train::dr_wrap(Action::MoveForward, 0.3, rng) == Action::Stop) ++stops;
  CHECK(std::abs(stops / double(n) - 0.3) < 0.005);
  // p_stop = 0 is the identity.
  for (int i = 0; i < 100; ++i)
    CHECK(train::dr_wrap(Action::TurnLeft, 0.0, rng) == Action::TurnLeft);
}

TEST_CASE("collect_rollouts is worker-count independent") {
  TaskSpec spec = presets::get("coop_mini");
  Rng prng(77);
  std::vector<nn::PolicyParams> team{
      nn::make_policy(static_cast<int>(arena::observe(
                          arena::init_task(spec, 0), 0).size()),
                      static_cast<int>(arena::observe_joint(
                          arena::init_task(spec, 0)).size()),
                      nn::NetConfig{2, 32, 0.01, 1.0}, prng)};

  train::CollectConfig cc;
  cc.steps = 16;
  auto run = [&](int workers) {
    auto envs = make_envs(spec, 6, 5);
    train::CollectConfig c = cc;
    c.num_workers = workers;
    return train::collect_rollouts(envs, team, c);
  };
  train::RolloutBatch a = run(1);
  train::RolloutBatch b = run(3);
  REQUIRE(a.envs.size() == b.envs.size());
  for (size_t e = 0; e < a.envs.size(); ++e) {
    REQUIRE(a.envs[e].size() == b.envs[e].size());
    for (size_t t = 0; t < a.envs[e].size(); ++t) {
      CHECK(a.envs[e][t].actions == b.envs[e][t].actions);
      CHECK(a.envs[e][t].log_probs == b.envs[e][t].log_probs);
      CHECK(a.envs[e][t].team_reward == b.envs[e][t].team_reward);
      CHECK(a.envs[e][t].value == b.envs[e][t].value);
      CHECK(a.envs[e][t].done == b.envs[e][t].done);
    }
    CHECK(a.bootstrap_values[e] == b.bootstrap_values[e]);
  }
}

TEST_CASE("on-policy gradients: unit ratio, clip_eps=0 kills the surrogate") {
  TaskSpec spec = presets::get("fetch");
  WorldState probe = arena::init_task(spec, 0);
  Rng prng(31);
  std::vector<nn::PolicyParams> team{nn::make_policy(
      static_cast<int>(arena::observe(probe, 0).size()),
      static_cast<int>(arena::observe_joint(probe).size()),
      nn::NetConfig{2, 24, 0.01, 1.0}, prng)};

  auto envs = make_envs(spec, 3, 8);
  train::CollectConfig cc;
  cc.steps = 12;
  train::RolloutBatch batch = train::collect_rollouts(envs, team, cc);
  train::AdvantageSet adv = train::compute_gae(batch, 0.95, 0.95);

  train::PpoConfig pc;
  train::PpoStats stats;
  train::ppo_loss_backward(team[0], batch, adv, pc, &stats);
  CHECK(stats.mean_ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(stats.clip_fraction == 0.0);

  // clip_eps = 0 at ratio 1 clips every sample; without the entropy bonus
  // the actor gradient vanishes identically.
  train::PpoConfig hard = pc;
  hard.clip_eps = 0.0;
  hard.entropy_coef = 0.0;
  train::PpoGrads g = train::ppo_loss_backward(team[0], batch, adv, hard);
  double max_actor = 0.0;
  for (double x : g.actor) max_actor = std::max(max_actor, std::abs(x));
  CHECK(max_actor < 1e-12);
  double max_critic = 0.0;
  for (double x : g.critic) max_critic = std::max(max_critic, std::abs(x));
  CHECK(max_critic > 0.0);  // value loss still active
}

TEST_CASE("ppo_loss_backward matches finite differences of ppo_loss") {
  TaskSpec spec = presets::get("fetch");
  WorldState probe = arena::init_task(spec, 0);
  Rng prng(8);
  nn::PolicyParams params = nn::make_policy(
      static_cast<int>(arena::observe(probe, 0).size()),
      static_cast<int>(arena::observe_joint(probe).size()),
      nn::NetConfig{2, 16, 0.01, 1.0}, prng);
  std::vector<nn::PolicyParams> behavior{params};

  auto envs = make_envs(spec, 2, 21);
  train::CollectConfig cc;
  cc.steps = 8;
  train::RolloutBatch batch = train::collect_rollouts(envs, behavior, cc);
  train::AdvantageSet adv = train::compute_gae(batch, 0.95, 0.95);

  // Differentiate at a point away from the behavior policy so the clip and
  // ratio terms are exercised.
  Rng jig(99);
  nn::PolicyParams theta = params;
  for (auto& w : theta.actor.params()) w += 0.01 * jig.normal();
  for (auto& w : theta.critic.params()) w += 0.01 * jig.normal();

  train::PpoConfig pc;
  train::PpoGrads g = train::ppo_loss_backward(theta, batch, adv, pc);

  const double h = 1e-6;
  double max_rel = 0.0;
  auto probe_params = [&](std::vector<double>& vec,
                          const std::vector<double>& grad, size_t stride) {
    for (size_t i = 0; i < vec.size(); i += stride) {
      double orig = vec[i];
      vec[i] = orig + h;
      double up = train::ppo_loss(theta, batch, adv, pc);
      vec[i] = orig - h;
      double dn = train::ppo_loss(theta, batch, adv, pc);
      vec[i] = orig;
      double fd = (up - dn) / (2 * h);
      double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      max_rel = std::max(max_rel, std::abs(fd - grad[i]) / denom);
    }
  };
  probe_params(theta.actor.params(), g.actor, 53);
  probe_params(theta.critic.params(), g.critic, 53);
  CHECK(max_rel < 1e-4);
}

TEST_CASE("selfplay_step swaps on threshold and resets the window") {
  train::LeagueState lg;
  lg.threshold = 0.55;
  lg.window_len = 10;
  CHECK(lg.active_team() == 0);

  // 5 wins out of 10: below threshold, no swap.
  lg = train::selfplay_step(
      lg, {true, false, true, false, true, false, true, false, true, false});
  CHECK(lg.active_team() == 0);
  CHECK(lg.swaps == 0);
  CHECK(lg.window.size() == 10);

  // Push wins until the rolling rate crosses 0.55.
  lg = train::selfplay_step(lg, {true, true});
  CHECK(lg.active_team() == 1);
  CHECK(lg.swaps == 1);
  CHECK(lg.window.empty());

  // Window must not grow past window_len.
  lg = train::selfplay_step(lg, std::vector<bool>(25, false));
  CHECK(lg.window.size() == 10);
  CHECK(lg.active_team() == 1);
}

TEST_CASE("train metrics are deterministic across reruns") {
  TaskSpec spec = presets::get("fetch");
  train::TrainConfig cfg;
  cfg.total_steps = 1024;
  cfg.num_envs = 4;
  cfg.steps_per_update = 64;
  cfg.lr = 3e-4;
  cfg.net = nn::NetConfig{2, 32, 0.01, 1.0};
  cfg.seed = 5;
  train::TrainResult a = train::train(spec, cfg);
  train::TrainResult b = train::train(spec, cfg);
  CHECK(a.metrics == b.metrics);
  CHECK_FALSE(a.metrics.empty());
  CHECK(a.env_steps == b.env_steps);
}

TEST_CASE("ppo learns fetch beyond a random policy") {
  TaskSpec spec = presets::get("fetch");
  WorldState probe = arena::init_task(spec, 0);
  Rng prng(2);
  // Random-policy baseline.
  std::vector<nn::PolicyParams> random_team{nn::make_policy(
      static_cast<int>(arena::observe(probe, 0).size()),
      static_cast<int>(arena::observe_joint(probe).size()),
      nn::NetConfig{2, 32, 0.01, 1.0}, prng)};
  eval::EvalConfig ec;
  ec.episodes = 100;
  double baseline =
      eval::evaluate_sync(random_team, spec, ec).success_rate;

  train::TrainConfig cfg;
  cfg.total_steps = 30000;
  cfg.num_envs = 8;
  cfg.steps_per_update = 128;
  cfg.lr = 3e-4;
  cfg.ppo.entropy_coef = 0.001;
  cfg.seed = 0;
  train::TrainResult res = train::train(spec, cfg);
  double trained =
      eval::evaluate_sync(res.team_params, spec, ec).success_rate;
  INFO("baseline=", baseline, " trained=", trained);
  CHECK(trained >= baseline + 0.3);
  CHECK(trained >= 0.5);
}
