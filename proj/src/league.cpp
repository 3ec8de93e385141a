#include "craft/league.hpp"

namespace craft::train {

LeagueState selfplay_step(LeagueState league,
                          const std::vector<bool>& active_team_wins) {
  for (bool w : active_team_wins) {
    league.window.push_back(w);
    while (league.window.size() > league.window_len) league.window.pop_front();
    if (league.window.size() < league.window_len) continue;
    size_t wins = 0;
    for (bool b : league.window) wins += b ? 1 : 0;
    const double rate =
        static_cast<double>(wins) / static_cast<double>(league.window.size());
    if (rate >= league.threshold) {
      const int active = league.active_team();
      league.training_active[active] = false;
      league.training_active[1 - active] = true;
      league.window.clear();
      league.swaps += 1;
    }
  }
  return league;
}

}  // namespace craft::train
