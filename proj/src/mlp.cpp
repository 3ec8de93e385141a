#include "craft/mlp.hpp"

#include <cmath>
#include <string>

namespace craft::nn {

namespace {

// Orthogonal matrix via Gram-Schmidt on Gaussian rows (rows of W when
// out <= in, otherwise on columns through the transpose).
void orthogonal_init(double* w, int out, int in, double gain, Rng& rng) {
  int rows = out, cols = in;
  bool transposed = false;
  if (rows > cols) {
    std::swap(rows, cols);
    transposed = true;
  }
  std::vector<double> a(static_cast<size_t>(rows) * cols);
  for (auto& v : a) v = rng.normal();
  for (int i = 0; i < rows; ++i) {
    double* ri = &a[static_cast<size_t>(i) * cols];
    for (int j = 0; j < i; ++j) {
      const double* rj = &a[static_cast<size_t>(j) * cols];
      double dot = 0;
      for (int k = 0; k < cols; ++k) dot += ri[k] * rj[k];
      for (int k = 0; k < cols; ++k) ri[k] -= dot * rj[k];
    }
    double norm = 0;
    for (int k = 0; k < cols; ++k) norm += ri[k] * ri[k];
    norm = std::sqrt(norm);
    if (norm < 1e-12) norm = 1.0;  // degenerate draw; keep direction
    for (int k = 0; k < cols; ++k) ri[k] /= norm;
  }
  for (int i = 0; i < out; ++i)
    for (int j = 0; j < in; ++j) {
      double v = transposed ? a[static_cast<size_t>(j) * out + i]
                            : a[static_cast<size_t>(i) * in + j];
      w[static_cast<size_t>(i) * in + j] = gain * v;
    }
}

}  // namespace

Mlp Mlp::create(const std::vector<int>& sizes, double output_gain, Rng& rng) {
  if (sizes.size() < 2) throw ContractError("Mlp needs at least two sizes");
  Mlp m;
  m.sizes_ = sizes;
  size_t total = 0;
  for (size_t l = 0; l + 1 < sizes.size(); ++l)
    total += static_cast<size_t>(sizes[l]) * sizes[l + 1] + sizes[l + 1];
  m.params_.assign(total, 0.0);
  for (int l = 0; l < m.num_layers(); ++l) {
    bool last = l == m.num_layers() - 1;
    double gain = last ? output_gain : std::sqrt(2.0);
    orthogonal_init(&m.params_[m.weight_offset(l)], sizes[l + 1], sizes[l],
                    gain, rng);
    // biases stay zero
  }
  return m;
}

size_t Mlp::weight_offset(int layer) const {
  size_t off = 0;
  for (int l = 0; l < layer; ++l)
    off += static_cast<size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  return off;
}

size_t Mlp::bias_offset(int layer) const {
  return weight_offset(layer) +
         static_cast<size_t>(sizes_[layer]) * sizes_[layer + 1];
}

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
  Cache cache;
  return forward(x, cache);
}

std::vector<double> Mlp::forward(const std::vector<double>& x,
                                 Cache& cache) const {
  if (static_cast<int>(x.size()) != input_size())
    throw ContractError("Mlp input size " + std::to_string(x.size()) +
                        ", expected " + std::to_string(input_size()));
  cache.activations.clear();
  cache.activations.reserve(num_layers());
  const std::vector<double>* cur = &x;
  for (int l = 0; l < num_layers(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double* w = &params_[weight_offset(l)];
    const double* b = &params_[bias_offset(l)];
    std::vector<double> y(out);
    const bool last = l == num_layers() - 1;
    for (int i = 0; i < out; ++i) {
      const double* wi = w + static_cast<size_t>(i) * in;
      double acc = b[i];
      for (int k = 0; k < in; ++k) acc += wi[k] * (*cur)[k];
      y[i] = last ? acc : (acc > 0.0 ? acc : 0.0);
    }
    cache.activations.push_back(std::move(y));
    cur = &cache.activations.back();
  }
  return cache.activations.back();
}

void Mlp::backward(const std::vector<double>& x, const Cache& cache,
                   const std::vector<double>& dout,
                   std::vector<double>& grad) const {
  if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
  if (static_cast<int>(dout.size()) != output_size())
    throw ContractError("Mlp backward: bad dout size");

  std::vector<double> delta = dout;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const std::vector<double>& input =
        l == 0 ? x : cache.activations[static_cast<size_t>(l) - 1];
    const std::vector<double>& output = cache.activations[l];
    const bool last = l == num_layers() - 1;
    if (!last) {
      // ReLU gate: output stores post-activation values.
      for (int i = 0; i < out; ++i)
        if (output[i] <= 0.0) delta[i] = 0.0;
    }
    for (int i = 0; i < out; ++i) {
      if (!std::isfinite(delta[i]))
        throw NumericError("non-finite gradient at layer " +
                           std::to_string(l));
    }
    double* gw = &grad[weight_offset(l)];
    double* gb = &grad[bias_offset(l)];
    const double* w = &params_[weight_offset(l)];
    std::vector<double> dprev(in, 0.0);
    for (int i = 0; i < out; ++i) {
      const double di = delta[i];
      if (di == 0.0) continue;
      double* gwi = gw + static_cast<size_t>(i) * in;
      const double* wi = w + static_cast<size_t>(i) * in;
      for (int k = 0; k < in; ++k) {
        gwi[k] += di * input[k];
        dprev[k] += di * wi[k];
      }
      gb[i] += di;
    }
    delta = std::move(dprev);
  }
}

}  // namespace craft::nn
