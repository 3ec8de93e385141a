#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "craft/config.hpp"
#include "craft/eval.hpp"
#include "craft/oodsi.hpp"
#include "craft/presets.hpp"
#include "craft/replay.hpp"
#include "craft/report.hpp"
#include "craft/serialize.hpp"
#include "craft/trainer.hpp"

namespace fs = std::filesystem;
using namespace craft;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string env = "sync";
  std::optional<int> episodes;
  std::optional<std::string> out;
};

cli::ExperimentConfig load(const CommonOpts& o) {
  if (o.config_path.empty()) throw ConfigError("--config is required");
  cli::ExperimentConfig cfg = cli::load_config(o.config_path);
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.episodes) {
    if (*o.episodes <= 0) throw ConfigError("--episodes must be positive");
    cfg.eval_episodes = *o.episodes;
  }
  if (o.out) cfg.out_dir = *o.out;
  return cfg;
}

fs::path run_dir(const cli::ExperimentConfig& cfg) {
  fs::path dir = fs::path(cfg.out_dir) / (cli::method_label(cfg) + "_" + cfg.task);
  fs::create_directories(dir);
  return dir;
}

std::string ckpt_name(uint64_t seed, int team) {
  return "ckpt_s" + std::to_string(seed) + "_t" + std::to_string(team) + ".bin";
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot open for write: " + p.string());
  os << text;
}

std::vector<nn::PolicyParams> load_team_checkpoints(
    const fs::path& dir, uint64_t seed, const TaskSpec& spec) {
  std::vector<nn::PolicyParams> params;
  for (int t = 0; t < spec.num_teams(); ++t) {
    const fs::path p = dir / ckpt_name(seed, t);
    if (!fs::exists(p))
      throw ConfigError("missing checkpoint: " + p.string());
    nn::PolicyParams pp = nn::load_checkpoint(p.string());
    nn::validate_shapes(pp, arena::observation_size(spec),
                        arena::joint_observation_size(spec));
    params.push_back(std::move(pp));
  }
  return params;
}

int cmd_train(const CommonOpts& o) {
  cli::ExperimentConfig cfg = load(o);
  if (cfg.train_steps <= 0) throw ConfigError("train_steps must be positive");
  const TaskSpec spec = cli::task_of(cfg);
  const fs::path dir = run_dir(cfg);

  for (uint64_t seed : cfg.seeds) {
    if (cfg.oodsi) {
      oodsi::PipelineConfig pc = cli::to_pipeline_config(cfg, seed);
      oodsi::PipelineResult res = oodsi::oodsi_pipeline(pc);
      for (int t = 0; t < spec.num_teams(); ++t)
        nn::save_checkpoint((dir / ckpt_name(seed, t)).string(),
                            res.final_params[t]);
      oodsi::save_start_state_set(
          (dir / ("startset_s" + std::to_string(seed) + ".txt")).string(),
          res.start_set);
      write_file(dir / ("pipeline_s" + std::to_string(seed) + ".tsv"),
                 res.report);
    } else {
      train::TrainConfig tc = cli::to_train_config(cfg, seed);
      train::TrainResult res = train::train(spec, tc);
      for (int t = 0; t < spec.num_teams(); ++t)
        nn::save_checkpoint((dir / ckpt_name(seed, t)).string(),
                            res.team_params[t]);
      write_file(dir / ("metrics_s" + std::to_string(seed) + ".tsv"),
                 res.metrics);
    }
    std::cout << "trained seed " << seed << " -> " << dir.string() << "\n";
  }
  return 0;
}

int cmd_eval(const CommonOpts& o) {
  cli::ExperimentConfig cfg = load(o);
  if (o.env != "sync" && o.env != "async")
    throw ConfigError("--env must be sync or async");
  const TaskSpec spec = cli::task_of(cfg);
  const fs::path dir = run_dir(cfg);

  std::vector<double> rates;
  for (uint64_t seed : cfg.seeds) {
    std::vector<nn::PolicyParams> params =
        load_team_checkpoints(dir, seed, spec);
    eval::EvalConfig ec;
    ec.episodes = cfg.eval_episodes;
    ec.guidance = cfg.guidance;
    ec.seed = seed;
    eval::EvalResult res =
        o.env == "sync"
            ? eval::evaluate_sync(params, spec, ec)
            : eval::evaluate_async(params, spec, cfg.duration, ec);
    double rate = res.success_rate;
    // Competitive tasks report the summed win rate of both teams.
    if (spec.mode == TaskMode::Competitive)
      rate = res.team_success[0] + res.team_success[1];
    rates.push_back(100.0 * rate);
  }
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= static_cast<double>(rates.size());
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  const double stddev =
      rates.size() > 1 ? std::sqrt(var / static_cast<double>(rates.size() - 1))
                       : 0.0;

  report::ResultTable table;
  table.rows.push_back(
      {cli::method_label(cfg), cfg.task, o.env, mean, stddev});
  const std::string text = report::format_table(table);
  std::cout << text;
  write_file(dir / ("eval_" + o.env + ".tsv"), report::format_delimited(table));
  return 0;
}

int cmd_collect(const CommonOpts& o) {
  cli::ExperimentConfig cfg = load(o);
  const TaskSpec spec = cli::task_of(cfg);
  const fs::path dir = run_dir(cfg);
  const uint64_t seed = cfg.seeds.front();

  std::vector<nn::PolicyParams> params = load_team_checkpoints(dir, seed, spec);
  const int episodes = o.episodes ? *o.episodes : cfg.collect_episodes;
  std::vector<async::Trajectory> trajs = oodsi::collect_ood_trajectories(
      params, spec, cfg.duration, episodes, seed, cfg.guidance);
  io::save_trajectories(
      (dir / ("trajs_s" + std::to_string(seed) + ".txt")).string(), trajs);

  Rng rng(seed);
  oodsi::StartStateSet set =
      oodsi::build_start_state_set(trajs, cfg.n_traj, cfg.n_segments, rng);
  set.p_ood = cfg.p_ood;
  oodsi::save_start_state_set(
      (dir / ("startset_s" + std::to_string(seed) + ".txt")).string(), set);
  std::cout << "collected " << trajs.size() << " trajectories, "
            << set.states.size() << " start states -> " << dir.string()
            << "\n";
  return 0;
}

int cmd_replay(const std::string& file, double speed) {
  std::vector<async::Trajectory> trajs = io::load_trajectories(file);
  for (const auto& traj : trajs) {
    for (const std::string& frame : replay::render_trajectory(traj)) {
      std::cout << frame << "\n";
      if (speed > 0.0)
        std::this_thread::sleep_for(
            std::chrono::duration<double>(speed));
    }
  }
  return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_path) {
  std::ifstream is(in_path);
  if (!is) throw ConfigError("cannot open: " + in_path);
  report::ResultTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("method\t", 0) == 0) continue;
    std::istringstream row(line);
    report::ResultRow r;
    std::string mean, stddev;
    if (!std::getline(row, r.method, '\t') ||
        !std::getline(row, r.task, '\t') ||
        !std::getline(row, r.environment, '\t') ||
        !std::getline(row, mean, '\t') || !std::getline(row, stddev, '\t'))
      throw ContractError("report input line " + std::to_string(lineno) +
                          ": expected 5 tab-separated fields");
    try {
      r.mean = std::stod(mean);
      r.stddev = std::stod(stddev);
    } catch (const std::exception&) {
      throw ContractError("report input line " + std::to_string(lineno) +
                          ": bad number");
    }
    table.rows.push_back(std::move(r));
  }
  const std::string text = report::format_table(table);
  std::cout << text;
  if (!out_path.empty()) {
    write_file(out_path, text);
    write_file(out_path + ".tsv", report::format_delimited(table));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"craft arena experiment harness"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string replay_file, report_in, report_out;
  double replay_speed = 0.0;

  const auto add_common = [&](CLI::App* sub, bool env_flag) {
    sub->add_option("--config", opts.config_path, "experiment config (JSON)");
    sub->add_option("--seed", opts.seed, "override the config seed list");
    sub->add_option("--episodes", opts.episodes, "evaluation episode count");
    sub->add_option("--out", opts.out, "output directory");
    if (env_flag)
      sub->add_option("--env", opts.env, "environment: sync|async")
          ->check(CLI::IsMember({"sync", "async"}));
  };

  CLI::App* train = app.add_subcommand("train", "train policies per seed");
  add_common(train, false);
  CLI::App* eval = app.add_subcommand("eval", "evaluate checkpoints");
  add_common(eval, true);
  CLI::App* collect =
      app.add_subcommand("collect", "collect async trajectories + start states");
  add_common(collect, false);
  CLI::App* replay = app.add_subcommand("replay", "render a trajectory file");
  replay->add_option("--file", replay_file, "trajectory file")->required();
  replay->add_option("--speed", replay_speed, "seconds between frames");
  CLI::App* report = app.add_subcommand("report", "format a result table");
  report->add_option("--in", report_in, "delimited result rows")->required();
  report->add_option("--out", report_out, "write formatted tables here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(opts);
    if (eval->parsed()) return cmd_eval(opts);
    if (collect->parsed()) return cmd_collect(opts);
    if (replay->parsed()) return cmd_replay(replay_file, replay_speed);
    if (report->parsed()) return cmd_report(report_in, report_out);
  } catch (const ConfigError& ex) {
    std::cerr << "error: config: " << ex.what() << "\n";
    return 2;
  } catch (const ContractError& ex) {
    std::cerr << "error: contract: " << ex.what() << "\n";
    return 3;
  } catch (const LookupError& ex) {
    std::cerr << "error: lookup: " << ex.what() << "\n";
    return 4;
  } catch (const NumericError& ex) {
    std::cerr << "error: numeric: " << ex.what() << "\n";
    return 5;
  } catch (const std::exception& ex) {
    std::cerr << "error: internal: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
