#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "craft/async_arena.hpp"
#include "craft/types.hpp"

namespace craft::io {

// --- World record (single line, lossless round trip) ---
//
//   W <width> <height> <step> P <k> <p0> [<p1>] R <n> { <id> <team> <x> <y>
//   <level> <heading> <carry|-> <ub> <is> } O <n> { <id> <B|S> <x> <y>
//   <level> <heading> <folded> <carrier|-> }
std::string world_to_record(const WorldState& s);
WorldState world_from_record(const std::string& line);

// --- Trajectory files (line-delimited) ---
//
// Header:  TRAJ v1 id=<id> outcome=<team> success=<0|1> teams=<k>
// Record:  REC t=<time> robot=<id> mask=<bits> repl=<0|1>
//          acts=<a0,a1,...> rew=<r0,...> | <world record>
void write_trajectory(std::ostream& os, const async::Trajectory& traj);
async::Trajectory read_trajectory(std::istream& is);
void save_trajectories(const std::string& path,
                       const std::vector<async::Trajectory>& trajs);
std::vector<async::Trajectory> load_trajectories(const std::string& path);

// --- Structured text (JSON) configuration ---
TaskSpec taskspec_from_json(const std::string& text);
std::string taskspec_to_json(const TaskSpec& spec);
TaskSpec load_taskspec(const std::string& path);

async::DurationModel duration_model_from_json(const std::string& text);
std::string duration_model_to_json(const async::DurationModel& m);

// Exact decimal-free formatting for doubles (round-trips bit-exactly).
std::string format_double(double v);

}  // namespace craft::io
