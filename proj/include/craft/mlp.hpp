#pragma once

#include <vector>

#include "craft/rng.hpp"
#include "craft/types.hpp"

namespace craft::nn {

// Fully connected network with ReLU hidden layers and a linear output layer.
// Parameters live in one flat vector (per layer: row-major weights, then
// biases), which keeps the optimizer, gradient clipping, and checkpointing
// uniform.
class Mlp {
 public:
  Mlp() = default;
  // sizes = {input, hidden..., output}; weights get an orthogonal init scaled
  // by sqrt(2) on hidden layers and by `output_gain` on the final layer.
  static Mlp create(const std::vector<int>& sizes, double output_gain,
                    Rng& rng);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  const std::vector<int>& sizes() const { return sizes_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  size_t param_count() const { return params_.size(); }

  struct Cache {
    // Post-activation output of every layer (input excluded).
    std::vector<std::vector<double>> activations;
  };

  std::vector<double> forward(const std::vector<double>& x) const;
  std::vector<double> forward(const std::vector<double>& x, Cache& cache) const;

  // Accumulates dL/dparams into `grad` (flat, same layout as params) given
  // dL/doutput. Throws NumericError if an activation is non-finite.
  void backward(const std::vector<double>& x, const Cache& cache,
                const std::vector<double>& dout,
                std::vector<double>& grad) const;

  // Offset of layer l's weights / biases inside the flat parameter vector.
  size_t weight_offset(int layer) const;
  size_t bias_offset(int layer) const;

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;
};

}  // namespace craft::nn
