#include "craft/optim.hpp"

#include <cmath>
#include <string>

namespace craft::nn {

double clip_grad_norm(std::vector<double>& grads, double max_norm) {
  if (max_norm <= 0.0) throw ContractError("max_norm must be positive");
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  double norm = std::sqrt(sq);
  if (norm > max_norm) {
    double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
  return norm;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               OptState& opt) {
  if (params.size() != grads.size() || params.size() != opt.m.size())
    throw ContractError("adam_step: shape mismatch");
  for (size_t i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i]))
      throw NumericError("non-finite gradient component at index " +
                         std::to_string(i));
  opt.step += 1;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (size_t i = 0; i < params.size(); ++i) {
    opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * grads[i];
    opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * grads[i] * grads[i];
    const double mhat = opt.m[i] / bc1;
    const double vhat = opt.v[i] / bc2;
    params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
  }
}

}  // namespace craft::nn
