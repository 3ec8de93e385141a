#pragma once

#include <vector>

#include "craft/types.hpp"

namespace craft::nn {

// Adam accumulators for one flat parameter vector.
struct OptState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  OptState() = default;
  OptState(size_t size, double learning_rate)
      : m(size, 0.0), v(size, 0.0), lr(learning_rate) {}
};

// Scales the gradient in place so its global L2 norm does not exceed
// max_norm; below the bound it is untouched. Returns the pre-clip norm.
double clip_grad_norm(std::vector<double>& grads, double max_norm);

// Bias-corrected Adam update, in place. Throws NumericError on non-finite
// gradients.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               OptState& opt);

}  // namespace craft::nn
