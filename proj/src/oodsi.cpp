#include "craft/oodsi.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "craft/serialize.hpp"

namespace craft::oodsi {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::vector<async::Trajectory> collect_ood_trajectories(
    const std::vector<nn::PolicyParams>& team_params, const TaskSpec& spec,
    const async::DurationModel& model, int episodes, uint64_t seed,
    bool guidance, bool greedy) {
  arena::validate_spec(spec);
  if (episodes < 0) throw ConfigError("episodes must be non-negative");
  if (static_cast<int>(team_params.size()) != spec.num_teams())
    throw ConfigError("policy count does not match team count");

  std::vector<async::Trajectory> out;
  out.reserve(episodes);
  Rng root(seed);
  for (int ep = 0; ep < episodes; ++ep) {
    Rng rng = root.split(static_cast<uint64_t>(ep));
    WorldState start = arena::init_task(spec, rng.next_u64());
    Rng act_rng = rng.split(1);
    async::Policy policy = [&](const WorldState& s, int agent,
                               const ActionMask& legal) {
      ActionMask mask = legal;
      if (guidance) mask = arena::guided_action_mask(s, spec, agent, mask);
      const RobotState& r = s.robot(agent);
      std::vector<double> logits =
          team_params[r.team].actor.forward(arena::observe(s, agent));
      if (greedy) return nn::argmax_masked(logits, mask);
      return nn::sample_masked(logits, mask, act_rng).action;
    };
    async::Trajectory traj =
        async::run_async_episode(policy, start, model, spec, rng.next_u64());
    traj.id = static_cast<uint64_t>(ep);
    out.push_back(std::move(traj));
  }
  return out;
}

StartStateSet build_start_state_set(
    const std::vector<async::Trajectory>& trajectories, int n_traj,
    int n_segments, Rng& rng) {
  if (n_traj <= 0 || n_segments <= 0)
    throw ConfigError("n_traj and n_segments must be positive");

  // Only decision records are harvestable; the trailing terminal record
  // (deciding_robot == -1) never becomes a start state.
  const auto decisions = [](const async::Trajectory& t) {
    size_t n = t.records.size();
    if (n > 0 && t.records.back().deciding_robot < 0) --n;
    return n;
  };
  std::vector<size_t> usable;
  for (size_t i = 0; i < trajectories.size(); ++i)
    if (decisions(trajectories[i]) >= static_cast<size_t>(n_segments))
      usable.push_back(i);
  if (usable.size() < static_cast<size_t>(n_traj))
    throw ConfigError("only " + std::to_string(usable.size()) +
                      " trajectories have at least " +
                      std::to_string(n_segments) + " decision records, need " +
                      std::to_string(n_traj));

  // Uniform sample without replacement (partial Fisher-Yates).
  for (int k = 0; k < n_traj; ++k) {
    const size_t j =
        k + static_cast<size_t>(rng.uniform_int(
                static_cast<int>(usable.size() - static_cast<size_t>(k))));
    std::swap(usable[k], usable[j]);
  }

  StartStateSet set;
  for (int k = 0; k < n_traj; ++k) {
    const async::Trajectory& traj = trajectories[usable[k]];
    const size_t len = decisions(traj);
    const size_t base = len / static_cast<size_t>(n_segments);
    const size_t rem = len % static_cast<size_t>(n_segments);
    size_t idx = 0;
    for (int seg = 0; seg < n_segments; ++seg) {
      const async::TrajRecord& rec = traj.records[idx];
      HarvestedState h;
      h.state = rec.state;
      h.state.step_count = 0;
      h.traj_id = traj.id;
      h.segment = seg;
      h.time = rec.time;
      set.states.push_back(std::move(h));
      idx += base + (static_cast<size_t>(seg) < rem ? 1 : 0);
    }
  }
  return set;
}

WorldState sample_start_state(const StartStateSet& set,
                              const train::StartSampler& base_rho0, Rng& rng) {
  if (set.p_ood < 0.0 || set.p_ood > 1.0)
    throw ConfigError("p_ood must be in [0, 1]");
  if (set.states.empty() && set.p_ood > 0.0)
    throw ConfigError("start-state set is empty but p_ood > 0");
  if (!set.states.empty() && rng.uniform() < set.p_ood) {
    WorldState s =
        set.states[rng.uniform_int(static_cast<int>(set.states.size()))].state;
    s.step_count = 0;
    return s;
  }
  return base_rho0(rng);
}

train::StartSampler mixed_sampler(StartStateSet set,
                                  train::StartSampler base_rho0) {
  return [set = std::move(set), base = std::move(base_rho0)](Rng& rng) {
    return sample_start_state(set, base, rng);
  };
}

std::string start_state_set_to_text(const StartStateSet& set) {
  std::ostringstream os;
  os << "STARTSET v1 n=" << set.states.size()
     << " p_ood=" << io::format_double(set.p_ood) << "\n";
  for (const auto& h : set.states)
    os << "SRC traj=" << h.traj_id << " seg=" << h.segment
       << " t=" << io::format_double(h.time) << " | "
       << io::world_to_record(h.state) << "\n";
  os << "END\n";
  return os.str();
}

StartStateSet start_state_set_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    throw ConfigError("start-state set: empty input");
  size_t n = 0;
  StartStateSet set;
  {
    std::istringstream hs(line);
    std::string tag, ver, nf, pf;
    hs >> tag >> ver >> nf >> pf;
    if (tag != "STARTSET" || ver != "v1" || nf.rfind("n=", 0) != 0 ||
        pf.rfind("p_ood=", 0) != 0)
      throw ConfigError("start-state set: bad header: " + line);
    n = std::stoul(nf.substr(2));
    set.p_ood = std::stod(pf.substr(6));
  }
  while (std::getline(is, line)) {
    if (line == "END") break;
    if (line.rfind("SRC ", 0) != 0)
      throw ConfigError("start-state set: bad line: " + line);
    const size_t bar = line.find(" | ");
    if (bar == std::string::npos)
      throw ConfigError("start-state set: missing world record: " + line);
    HarvestedState h;
    {
      std::istringstream hs(line.substr(4, bar - 4));
      std::string tf, sf, timef;
      hs >> tf >> sf >> timef;
      if (tf.rfind("traj=", 0) != 0 || sf.rfind("seg=", 0) != 0 ||
          timef.rfind("t=", 0) != 0)
        throw ConfigError("start-state set: bad provenance: " + line);
      h.traj_id = std::stoull(tf.substr(5));
      h.segment = std::stoi(sf.substr(4));
      h.time = std::stod(timef.substr(2));
    }
    h.state = io::world_from_record(line.substr(bar + 3));
    set.states.push_back(std::move(h));
  }
  if (set.states.size() != n)
    throw ConfigError("start-state set: header count " + std::to_string(n) +
                        " does not match " + std::to_string(set.states.size()) +
                        " records");
  return set;
}

void save_start_state_set(const std::string& path, const StartStateSet& set) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for write: " + path);
  os << start_state_set_to_text(set);
}

StartStateSet load_start_state_set(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return start_state_set_from_text(buf.str());
}

namespace {

template <typename F>
auto phase(const char* label, F&& f) {
  try {
    return f();
  } catch (const std::exception& ex) {
    throw ContractError(std::string(label) + ": " + ex.what());
  }
}

}  // namespace

PipelineResult oodsi_pipeline(const PipelineConfig& cfg) {
  PipelineResult res;
  Rng root(cfg.seed);

  train::TrainResult phase1 = phase("phase 1 (sync train)", [&] {
    return train::train(cfg.spec, cfg.phase1);
  });
  res.phase1_params = phase1.team_params;

  std::vector<async::Trajectory> trajs = phase("phase 2 (async collect)", [&] {
    return collect_ood_trajectories(res.phase1_params, cfg.spec, cfg.model,
                                    cfg.collect_episodes, root.split(1).next_u64(),
                                    cfg.phase1.guidance, cfg.greedy_collect);
  });

  res.start_set = phase("phase 3 (harvest)", [&] {
    Rng rng = root.split(2);
    StartStateSet set =
        build_start_state_set(trajs, cfg.n_traj, cfg.n_segments, rng);
    set.p_ood = cfg.p_ood;
    return set;
  });

  if (cfg.phase4.total_steps > 0) {
    train::TrainResult phase4 = phase("phase 4 (retrain)", [&] {
      train::StartSampler mixed = mixed_sampler(
          res.start_set, train::default_start_sampler(cfg.spec));
      const std::vector<nn::PolicyParams>* init =
          cfg.retrain_from_scratch ? nullptr : &res.phase1_params;
      return train::train(cfg.spec, cfg.phase4, mixed, init);
    });
    res.final_params = phase4.team_params;
  } else {
    res.final_params = res.phase1_params;
  }

  eval::EvalConfig ec;
  ec.episodes = cfg.eval_episodes;
  ec.guidance = cfg.phase1.guidance;
  ec.seed = root.split(3).next_u64();
  const auto s1 = eval::evaluate_sync(res.phase1_params, cfg.spec, ec);
  const auto a1 = eval::evaluate_async(res.phase1_params, cfg.spec, cfg.model, ec);
  const auto s4 = eval::evaluate_sync(res.final_params, cfg.spec, ec);
  const auto a4 = eval::evaluate_async(res.final_params, cfg.spec, cfg.model, ec);
  res.phase1_sync = s1.success_rate;
  res.phase1_async = a1.success_rate;
  res.phase4_sync = s4.success_rate;
  res.phase4_async = a4.success_rate;

  std::ostringstream rep;
  rep << "phase\tenvironment\tepisodes\tsuccess\treward\n";
  const auto row = [&](const char* ph, const char* env,
                       const eval::EvalResult& r) {
    rep << ph << '\t' << env << '\t' << r.episodes << '\t'
        << fmt(r.success_rate) << '\t' << fmt(r.mean_reward) << '\n';
  };
  row("phase1", "sync", s1);
  row("phase1", "async", a1);
  row("phase4", "sync", s4);
  row("phase4", "async", a4);
  res.report = rep.str();
  return res;
}

}  // namespace craft::oodsi
