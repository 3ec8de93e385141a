#pragma once

#include <array>
#include <deque>

#include "craft/policy.hpp"

namespace craft::train {

// Two-team self-play controller: exactly one team trains at a time; once its
// rolling success rate crosses the pause threshold its weights freeze and the
// other team takes over.
struct LeagueState {
  std::array<bool, 2> training_active{true, false};
  std::array<nn::PolicyParams, 2> params;
  std::deque<bool> window;  // active team's recent episode outcomes
  double threshold = 0.55;
  size_t window_len = 100;
  int swaps = 0;

  int active_team() const { return training_active[0] ? 0 : 1; }
};

// Feeds new episode outcomes (wins of the active team) into the rolling
// window and swaps roles when the windowed success rate reaches the
// threshold. The window resets on a swap.
LeagueState selfplay_step(LeagueState league,
                          const std::vector<bool>& active_team_wins);

}  // namespace craft::train
