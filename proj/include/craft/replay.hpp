#pragma once

#include <string>
#include <vector>

#include "craft/async_arena.hpp"
#include "craft/types.hpp"

namespace craft::replay {

// ASCII rendering of a world state, both levels side by side. Each cell is
// three glyphs: object (. none, # block, f folded slope, ^>v< unfolded slope
// high end), robot team letter (A/B; lowercase while carrying), and robot
// heading (^>v<). Rows print north (max y) first.
std::string render_state(const WorldState& s);

// One frame per trajectory record: a header line with the timestamp and
// deciding robot, then the rendered state.
std::vector<std::string> render_trajectory(const async::Trajectory& traj);

}  // namespace craft::replay
