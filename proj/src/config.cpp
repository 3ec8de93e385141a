#include "craft/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "craft/presets.hpp"
#include "craft/serialize.hpp"
#include "json.hpp"

namespace craft::cli {

namespace {

using nlohmann::json;

template <typename T>
void pull(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config field '") + key + "': " + ex.what());
  }
}

const std::set<std::string> kKeys = {
    "task",          "guidance",      "dr",
    "p_stop",        "oodsi",         "n_traj",
    "n_segments",    "p_ood",         "seeds",
    "train_steps",   "retrain_steps", "eval_episodes",
    "out_dir",       "learning_rate", "batch",
    "discount",      "gae_lambda",    "max_episode_step",
    "clip_eps",      "entropy_coef",  "value_coef",
    "epochs",        "hidden_layers", "hidden_units",
    "num_envs",      "steps_per_update", "num_workers",
    "collect_episodes", "duration_model"};

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config parse: ") + ex.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKeys.count(key)) throw ConfigError("unknown config key: " + key);

  ExperimentConfig c;
  pull(j, "task", c.task);
  pull(j, "guidance", c.guidance);
  pull(j, "dr", c.dr);
  pull(j, "p_stop", c.p_stop);
  pull(j, "oodsi", c.oodsi);
  pull(j, "n_traj", c.n_traj);
  pull(j, "n_segments", c.n_segments);
  pull(j, "p_ood", c.p_ood);
  pull(j, "seeds", c.seeds);
  pull(j, "train_steps", c.train_steps);
  pull(j, "retrain_steps", c.retrain_steps);
  pull(j, "eval_episodes", c.eval_episodes);
  pull(j, "out_dir", c.out_dir);
  pull(j, "learning_rate", c.learning_rate);
  pull(j, "batch", c.batch);
  pull(j, "discount", c.discount);
  pull(j, "gae_lambda", c.gae_lambda);
  pull(j, "max_episode_step", c.max_episode_step);
  pull(j, "clip_eps", c.clip_eps);
  pull(j, "entropy_coef", c.entropy_coef);
  pull(j, "value_coef", c.value_coef);
  pull(j, "epochs", c.epochs);
  pull(j, "hidden_layers", c.hidden_layers);
  pull(j, "hidden_units", c.hidden_units);
  pull(j, "num_envs", c.num_envs);
  pull(j, "steps_per_update", c.steps_per_update);
  pull(j, "num_workers", c.num_workers);
  pull(j, "collect_episodes", c.collect_episodes);
  if (j.contains("duration_model"))
    c.duration = io::duration_model_from_json(j.at("duration_model").dump());

  if (c.seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (c.p_stop < 0.0 || c.p_stop > 1.0)
    throw ConfigError("p_stop must be in [0, 1]");
  if (c.p_ood < 0.0 || c.p_ood > 1.0)
    throw ConfigError("p_ood must be in [0, 1]");
  if (c.eval_episodes <= 0) throw ConfigError("eval_episodes must be positive");
  if (c.max_episode_step <= 0)
    throw ConfigError("max_episode_step must be positive");
  presets::get(c.task);  // rejects unknown preset with the valid list
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["task"] = c.task;
  j["guidance"] = c.guidance;
  j["dr"] = c.dr;
  j["p_stop"] = c.p_stop;
  j["oodsi"] = c.oodsi;
  j["n_traj"] = c.n_traj;
  j["n_segments"] = c.n_segments;
  j["p_ood"] = c.p_ood;
  j["seeds"] = c.seeds;
  j["train_steps"] = c.train_steps;
  j["retrain_steps"] = c.retrain_steps;
  j["eval_episodes"] = c.eval_episodes;
  j["out_dir"] = c.out_dir;
  j["learning_rate"] = c.learning_rate;
  j["batch"] = c.batch;
  j["discount"] = c.discount;
  j["gae_lambda"] = c.gae_lambda;
  j["max_episode_step"] = c.max_episode_step;
  j["clip_eps"] = c.clip_eps;
  j["entropy_coef"] = c.entropy_coef;
  j["value_coef"] = c.value_coef;
  j["epochs"] = c.epochs;
  j["hidden_layers"] = c.hidden_layers;
  j["hidden_units"] = c.hidden_units;
  j["num_envs"] = c.num_envs;
  j["steps_per_update"] = c.steps_per_update;
  j["num_workers"] = c.num_workers;
  j["collect_episodes"] = c.collect_episodes;
  j["duration_model"] = json::parse(io::duration_model_to_json(c.duration));
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return config_from_json(buf.str());
}

TaskSpec task_of(const ExperimentConfig& cfg) {
  TaskSpec spec = presets::get(cfg.task);
  spec.horizon = cfg.max_episode_step;
  return spec;
}

train::TrainConfig to_train_config(const ExperimentConfig& cfg,
                                   uint64_t seed) {
  train::TrainConfig t;
  t.total_steps = cfg.train_steps;
  t.num_envs = cfg.num_envs;
  t.steps_per_update = cfg.steps_per_update;
  t.num_workers = cfg.num_workers;
  t.guidance = cfg.guidance;
  t.dr.enabled = cfg.dr;
  t.dr.p_stop = cfg.p_stop;
  t.gamma = cfg.discount;
  t.gae_lambda = cfg.gae_lambda;
  t.lr = cfg.learning_rate;
  t.ppo.clip_eps = cfg.clip_eps;
  t.ppo.entropy_coef = cfg.entropy_coef;
  t.ppo.value_coef = cfg.value_coef;
  t.ppo.epochs = cfg.epochs;
  t.ppo.minibatch = cfg.batch;
  t.net.hidden_layers = cfg.hidden_layers;
  t.net.hidden_units = cfg.hidden_units;
  t.seed = seed;
  return t;
}

oodsi::PipelineConfig to_pipeline_config(const ExperimentConfig& cfg,
                                         uint64_t seed) {
  oodsi::PipelineConfig p;
  p.spec = task_of(cfg);
  p.model = cfg.duration;
  p.phase1 = to_train_config(cfg, seed);
  p.phase4 = to_train_config(cfg, seed + 1);
  p.phase4.total_steps =
      cfg.retrain_steps > 0 ? cfg.retrain_steps : cfg.train_steps;
  p.collect_episodes = cfg.collect_episodes;
  p.n_traj = cfg.n_traj;
  p.n_segments = cfg.n_segments;
  p.p_ood = cfg.p_ood;
  p.eval_episodes = cfg.eval_episodes;
  p.seed = seed;
  return p;
}

std::string method_label(const ExperimentConfig& cfg) {
  std::string m = "PPO";
  if (cfg.dr) m += "+DR";
  if (cfg.oodsi) m += "+OODSI";
  return m;
}

}  // namespace craft::cli
