#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "craft/arena.hpp"
#include "craft/async_arena.hpp"
#include "craft/config.hpp"
#include "craft/eval.hpp"
#include "craft/oodsi.hpp"
#include "craft/presets.hpp"
#include "craft/replay.hpp"
#include "craft/serialize.hpp"
#include "craft/trainer.hpp"

namespace py = pybind11;
using namespace craft;

PYBIND11_MODULE(_core, m) {
  m.doc() = "craft arena core bindings";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<ContractError>(m, "ContractError");
  py::register_exception<LookupError>(m, "CraftLookupError");
  py::register_exception<NumericError>(m, "NumericError");

  py::enum_<Action>(m, "Action")
      .value("MoveForward", Action::MoveForward)
      .value("MoveBack", Action::MoveBack)
      .value("MoveLeft", Action::MoveLeft)
      .value("MoveRight", Action::MoveRight)
      .value("TurnLeft", Action::TurnLeft)
      .value("TurnRight", Action::TurnRight)
      .value("Lift", Action::Lift)
      .value("Drop", Action::Drop)
      .value("Fold", Action::Fold)
      .value("Unfold", Action::Unfold)
      .value("Stop", Action::Stop);

  py::class_<TaskSpec>(m, "TaskSpec")
      .def_readonly("name", &TaskSpec::name)
      .def_readonly("width", &TaskSpec::width)
      .def_readonly("height", &TaskSpec::height)
      .def_readwrite("horizon", &TaskSpec::horizon)
      .def_property_readonly("num_teams", &TaskSpec::num_teams)
      .def_property_readonly(
          "num_robots",
          [](const TaskSpec& s) { return s.robots.size(); });

  py::class_<WorldState>(m, "WorldState")
      .def_readonly("width", &WorldState::width)
      .def_readonly("height", &WorldState::height)
      .def_readonly("step_count", &WorldState::step_count)
      .def_readonly("progress", &WorldState::progress)
      .def("signature", [](const WorldState& s) { return arena::signature(s); })
      .def("render", [](const WorldState& s) { return replay::render_state(s); })
      .def("record", [](const WorldState& s) { return io::world_to_record(s); });

  py::class_<StepResult>(m, "StepResult")
      .def_readonly("state", &StepResult::state)
      .def_readonly("team_rewards", &StepResult::team_rewards)
      .def_readonly("done", &StepResult::done);

  py::class_<ActionMask>(m, "ActionMask")
      .def("allowed",
           [](const ActionMask& mask, Action a) { return mask[a]; })
      .def("as_list", [](const ActionMask& mask) {
        std::vector<bool> out(mask.allowed.begin(), mask.allowed.end());
        return out;
      });

  m.def("preset_names", &presets::preset_names);
  m.def("preset", &presets::get, py::arg("name"));
  m.def("init_task", &arena::init_task, py::arg("spec"), py::arg("seed"));
  m.def("legal_action_mask", &arena::legal_action_mask, py::arg("state"),
        py::arg("spec"), py::arg("agent"));
  m.def("guided_action_mask", &arena::guided_action_mask, py::arg("state"),
        py::arg("spec"), py::arg("agent"), py::arg("base"));
  m.def("step_sync", &arena::step_sync, py::arg("state"), py::arg("spec"),
        py::arg("joint_action"));
  m.def("observe", &arena::observe, py::arg("state"), py::arg("agent"));
  m.def("observe_joint", &arena::observe_joint, py::arg("state"));
  m.def("check_invariants", &arena::check_invariants, py::arg("state"),
        py::arg("spec"));
  m.def("world_from_record", &io::world_from_record, py::arg("line"));
  m.def("taskspec_from_json", &io::taskspec_from_json, py::arg("text"));
  m.def("taskspec_to_json", &io::taskspec_to_json, py::arg("spec"));

  py::class_<async::DurationModel>(m, "DurationModel")
      .def(py::init<>())
      .def_readwrite("jitter", &async::DurationModel::jitter)
      .def("mean_step_duration", &async::DurationModel::mean_step_duration);

  py::class_<async::Trajectory>(m, "Trajectory")
      .def_readonly("id", &async::Trajectory::id)
      .def_readonly("outcome_team", &async::Trajectory::outcome_team)
      .def_readonly("success", &async::Trajectory::success)
      .def_property_readonly("num_records", [](const async::Trajectory& t) {
        return t.records.size();
      });

  py::class_<nn::PolicyParams>(m, "PolicyParams")
      .def_readonly("version", &nn::PolicyParams::version);
  m.def("save_checkpoint", &nn::save_checkpoint, py::arg("path"),
        py::arg("params"));
  m.def("load_checkpoint", &nn::load_checkpoint, py::arg("path"));

  py::class_<train::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("total_steps", &train::TrainConfig::total_steps)
      .def_readwrite("num_envs", &train::TrainConfig::num_envs)
      .def_readwrite("steps_per_update", &train::TrainConfig::steps_per_update)
      .def_readwrite("guidance", &train::TrainConfig::guidance)
      .def_readwrite("lr", &train::TrainConfig::lr)
      .def_readwrite("seed", &train::TrainConfig::seed)
      .def_readwrite("dr", &train::TrainConfig::dr)
      .def_readwrite("ppo", &train::TrainConfig::ppo);

  py::class_<train::DrConfig>(m, "DrConfig")
      .def(py::init<>())
      .def_readwrite("enabled", &train::DrConfig::enabled)
      .def_readwrite("p_stop", &train::DrConfig::p_stop);

  py::class_<train::PpoConfig>(m, "PpoConfig")
      .def(py::init<>())
      .def_readwrite("clip_eps", &train::PpoConfig::clip_eps)
      .def_readwrite("entropy_coef", &train::PpoConfig::entropy_coef)
      .def_readwrite("value_coef", &train::PpoConfig::value_coef)
      .def_readwrite("epochs", &train::PpoConfig::epochs)
      .def_readwrite("minibatch", &train::PpoConfig::minibatch);

  py::class_<train::TrainResult>(m, "TrainResult")
      .def_readonly("metrics", &train::TrainResult::metrics)
      .def_readonly("final_success", &train::TrainResult::final_success)
      .def_readonly("env_steps", &train::TrainResult::env_steps)
      .def_readonly("episodes", &train::TrainResult::episodes)
      .def_readonly("team_params", &train::TrainResult::team_params);

  m.def(
      "train",
      [](const TaskSpec& spec, const train::TrainConfig& cfg,
         const std::vector<nn::PolicyParams>& init) {
        return train::train(spec, cfg, nullptr,
                            init.empty() ? nullptr : &init);
      },
      py::arg("spec"), py::arg("config"),
      py::arg("init") = std::vector<nn::PolicyParams>{},
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "retrain_mixed",
      [](const TaskSpec& spec, const train::TrainConfig& cfg,
         const oodsi::StartStateSet& set,
         const std::vector<nn::PolicyParams>& init) {
        train::StartSampler mixed =
            oodsi::mixed_sampler(set, train::default_start_sampler(spec));
        return train::train(spec, cfg, mixed, init.empty() ? nullptr : &init);
      },
      py::arg("spec"), py::arg("config"), py::arg("start_set"),
      py::arg("init") = std::vector<nn::PolicyParams>{},
      py::call_guard<py::gil_scoped_release>());

  py::class_<eval::EvalResult>(m, "EvalResult")
      .def_readonly("episodes", &eval::EvalResult::episodes)
      .def_readonly("success_rate", &eval::EvalResult::success_rate)
      .def_readonly("mean_reward", &eval::EvalResult::mean_reward)
      .def_readonly("team_success", &eval::EvalResult::team_success);

  m.def(
      "evaluate_sync",
      [](const std::vector<nn::PolicyParams>& params, const TaskSpec& spec,
         int episodes, bool guidance, bool greedy, uint64_t seed) {
        eval::EvalConfig ec;
        ec.episodes = episodes;
        ec.guidance = guidance;
        ec.greedy = greedy;
        ec.seed = seed;
        return eval::evaluate_sync(params, spec, ec);
      },
      py::arg("params"), py::arg("spec"), py::arg("episodes") = 100,
      py::arg("guidance") = true, py::arg("greedy") = false, py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "evaluate_async",
      [](const std::vector<nn::PolicyParams>& params, const TaskSpec& spec,
         const async::DurationModel& model, int episodes, bool guidance,
         bool greedy, uint64_t seed) {
        eval::EvalConfig ec;
        ec.episodes = episodes;
        ec.guidance = guidance;
        ec.greedy = greedy;
        ec.seed = seed;
        return eval::evaluate_async(params, spec, model, ec);
      },
      py::arg("params"), py::arg("spec"),
      py::arg("model") = async::DurationModel{}, py::arg("episodes") = 100,
      py::arg("guidance") = true, py::arg("greedy") = false, py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "collect_ood_trajectories",
      [](const std::vector<nn::PolicyParams>& params, const TaskSpec& spec,
         const async::DurationModel& model, int episodes, uint64_t seed) {
        return oodsi::collect_ood_trajectories(params, spec, model, episodes,
                                               seed);
      },
      py::arg("params"), py::arg("spec"),
      py::arg("model") = async::DurationModel{}, py::arg("episodes") = 10,
      py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

  py::class_<oodsi::StartStateSet>(m, "StartStateSet")
      .def_readwrite("p_ood", &oodsi::StartStateSet::p_ood)
      .def_property_readonly("size", [](const oodsi::StartStateSet& s) {
        return s.states.size();
      });

  m.def(
      "build_start_state_set",
      [](const std::vector<async::Trajectory>& trajs, int n_traj,
         int n_segments, uint64_t seed) {
        Rng rng(seed);
        return oodsi::build_start_state_set(trajs, n_traj, n_segments, rng);
      },
      py::arg("trajectories"), py::arg("n_traj") = 3,
      py::arg("n_segments") = 5, py::arg("seed") = 0);

  m.def(
      "sync_greedy_episode",
      [](const std::vector<nn::PolicyParams>& params, const TaskSpec& spec,
         uint64_t seed, bool guidance) {
        Rng rng(seed);
        WorldState s = arena::init_task(spec, rng.next_u64());
        async::Policy pol = eval::greedy_policy(params, spec, guidance);
        std::vector<std::pair<std::string, std::vector<std::string>>> frames;
        while (!arena::is_done(s, spec)) {
          std::vector<Action> joint(s.robots.size(), Action::Stop);
          std::vector<std::string> names;
          for (const auto& r : s.robots) {
            joint[r.id] = pol(s, r.id, arena::legal_action_mask(s, spec, r.id));
            names.push_back(action_name(joint[r.id]));
          }
          frames.emplace_back(replay::render_state(s), names);
          s = arena::step_sync(s, spec, joint).state;
        }
        frames.emplace_back(replay::render_state(s),
                            std::vector<std::string>{});
        return frames;
      },
      py::arg("params"), py::arg("spec"), py::arg("seed") = 0,
      py::arg("guidance") = true);

  m.def("save_trajectories", &io::save_trajectories, py::arg("path"),
        py::arg("trajectories"));
  m.def("load_trajectories", &io::load_trajectories, py::arg("path"));
  m.def("save_start_state_set", &oodsi::save_start_state_set, py::arg("path"),
        py::arg("set"));
  m.def("load_start_state_set", &oodsi::load_start_state_set, py::arg("path"));
}
