#pragma once

#include <vector>

#include "craft/rollout.hpp"

namespace craft::train {

struct AdvantageSet {
  std::vector<std::vector<double>> advantages;  // [env][step], unnormalized
  std::vector<std::vector<double>> returns;     // advantages + values
};

// Standard GAE recursion over each environment's step sequence; done flags
// reset the recursion and drop the bootstrap across episode boundaries.
AdvantageSet compute_gae(const RolloutBatch& batch, double gamma,
                         double lambda);

}  // namespace craft::train
