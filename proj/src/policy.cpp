#include "craft/policy.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace craft::nn {

PolicyParams make_policy(int obs_size, int joint_obs_size,
                         const NetConfig& cfg, Rng& rng) {
  std::vector<int> actor_sizes{obs_size};
  std::vector<int> critic_sizes{joint_obs_size};
  for (int l = 0; l < cfg.hidden_layers; ++l) {
    actor_sizes.push_back(cfg.hidden_units);
    critic_sizes.push_back(cfg.hidden_units);
  }
  actor_sizes.push_back(kNumActions);
  critic_sizes.push_back(1);
  PolicyParams p;
  p.actor = Mlp::create(actor_sizes, cfg.policy_head_gain, rng);
  p.critic = Mlp::create(critic_sizes, cfg.value_head_gain, rng);
  return p;
}

std::pair<std::vector<double>, double> forward(const PolicyParams& params,
                                               const Observation& obs,
                                               const Observation& joint_obs) {
  std::vector<double> logits = params.actor.forward(obs);
  double value = params.critic.forward(joint_obs)[0];
  return {std::move(logits), value};
}

MaskedDistribution MaskedDistribution::from_logits(
    const std::vector<double>& logits, const ActionMask& mask) {
  if (static_cast<int>(logits.size()) != kNumActions)
    throw ContractError("expected 11 logits");
  if (mask.count_allowed() == 0)
    throw ContractError("all-false action mask");
  MaskedDistribution d;
  d.mask = mask;
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < kNumActions; ++a) {
    d.logits[a] = logits[a];
    if (mask.allowed[a]) max_logit = std::max(max_logit, logits[a]);
  }
  double z = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if (mask.allowed[a]) {
      d.probs[a] = std::exp(logits[a] - max_logit);
      z += d.probs[a];
    } else {
      d.probs[a] = 0.0;
    }
  }
  for (int a = 0; a < kNumActions; ++a) d.probs[a] /= z;
  return d;
}

double MaskedDistribution::log_prob(Action a) const {
  int i = static_cast<int>(a);
  if (!mask.allowed[i]) throw ContractError("log_prob of masked action");
  // Recompute from logits for accuracy near probability one.
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kNumActions; ++k)
    if (mask.allowed[k]) max_logit = std::max(max_logit, logits[k]);
  double z = 0.0;
  for (int k = 0; k < kNumActions; ++k)
    if (mask.allowed[k]) z += std::exp(logits[k] - max_logit);
  return logits[i] - max_logit - std::log(z);
}

double MaskedDistribution::entropy() const {
  double h = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if (probs[a] > 0.0) h -= probs[a] * std::log(probs[a]);
  }
  return h;
}

SampleResult sample_masked(const std::vector<double>& logits,
                           const ActionMask& mask, Rng& rng) {
  MaskedDistribution d = MaskedDistribution::from_logits(logits, mask);
  double u = rng.uniform();
  double cum = 0.0;
  int chosen = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (d.probs[a] <= 0.0) continue;
    cum += d.probs[a];
    if (u < cum) {
      chosen = a;
      break;
    }
  }
  if (chosen < 0) {  // numerical tail; pick the last allowed action
    for (int a = kNumActions - 1; a >= 0; --a)
      if (d.probs[a] > 0.0) {
        chosen = a;
        break;
      }
  }
  SampleResult r;
  r.action = static_cast<Action>(chosen);
  r.log_prob = d.log_prob(r.action);
  r.entropy = d.entropy();
  return r;
}

Action argmax_masked(const std::vector<double>& logits,
                     const ActionMask& mask) {
  int best = -1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < kNumActions; ++a) {
    if (!mask.allowed[a]) continue;
    if (logits[a] > best_v) {
      best_v = logits[a];
      best = a;
    }
  }
  return static_cast<Action>(best);
}

namespace {

constexpr char kMagic[8] = {'C', 'R', 'A', 'F', 'T', 'C', 'K', 'P'};
constexpr uint32_t kFormatVersion = 2;

void write_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_mlp(std::ostream& os, const Mlp& m) {
  write_u32(os, static_cast<uint32_t>(m.sizes().size()));
  for (int s : m.sizes()) write_u32(os, static_cast<uint32_t>(s));
  // Doubles, not floats: resuming training from a checkpoint must follow the
  // same trajectory as training that never left memory.
  os.write(reinterpret_cast<const char*>(m.params().data()),
           static_cast<std::streamsize>(m.param_count() * sizeof(double)));
}

Mlp read_mlp(std::istream& is) {
  uint32_t n = read_u32(is);
  if (!is || n < 2 || n > 64) throw ConfigError("corrupt checkpoint: sizes");
  std::vector<int> sizes(n);
  for (auto& s : sizes) s = static_cast<int>(read_u32(is));
  Rng rng(0);
  Mlp m = Mlp::create(sizes, 1.0, rng);
  is.read(reinterpret_cast<char*>(m.params().data()),
          static_cast<std::streamsize>(m.param_count() * sizeof(double)));
  if (!is) throw ConfigError("corrupt checkpoint: truncated parameters");
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const PolicyParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write checkpoint: " + path);
  os.write(kMagic, sizeof(kMagic));
  write_u32(os, kFormatVersion);
  write_u32(os, static_cast<uint32_t>(params.version));
  write_u32(os, 2);
  write_mlp(os, params.actor);
  write_mlp(os, params.critic);
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ConfigError("not a checkpoint file: " + path);
  if (read_u32(is) != kFormatVersion)
    throw ConfigError("unsupported checkpoint format version");
  PolicyParams p;
  p.version = static_cast<int>(read_u32(is));
  if (read_u32(is) != 2) throw ConfigError("corrupt checkpoint: network count");
  p.actor = read_mlp(is);
  p.critic = read_mlp(is);
  return p;
}

void validate_shapes(const PolicyParams& params, int obs_size,
                     int joint_obs_size) {
  if (params.actor.input_size() != obs_size)
    throw ConfigError("checkpoint actor expects observation length " +
                      std::to_string(params.actor.input_size()) +
                      ", task produces " + std::to_string(obs_size));
  if (params.actor.output_size() != kNumActions)
    throw ConfigError("checkpoint actor head is not 11-way");
  if (params.critic.input_size() != joint_obs_size)
    throw ConfigError("checkpoint critic expects joint observation length " +
                      std::to_string(params.critic.input_size()) +
                      ", task produces " + std::to_string(joint_obs_size));
  if (params.critic.output_size() != 1)
    throw ConfigError("checkpoint critic head is not scalar");
}

}  // namespace craft::nn
