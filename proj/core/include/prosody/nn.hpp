// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "prosody/tensor.hpp"

namespace prosody {

struct Param {
  std::string name;
  Tensor2D value;
  Tensor2D grad;

  Param() = default;
  Param(std::string n, int r, int c) : name(std::move(n)), value(r, c), grad(r, c) {}
};

// Flat registry over a model's parameters; the unit the optimizer,
// checkpointing, and finite-difference checks operate on.
struct ParamSet {
  std::vector<Param*> items;

  void add(Param* p) { items.push_back(p); }
  void zero_grad() {
    for (Param* p : items) p->grad.fill(0.0);
  }
  size_t count() const {
    size_t n = 0;
    for (const Param* p : items) n += p->value.size();
    return n;
  }
  bool grads_finite() const {
    for (const Param* p : items)
      if (!p->grad.finite()) return false;
    return true;
  }
};

inline void uniform_init(Tensor2D& w, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& x : w.v) x = dist(rng);
}

// Fully connected: y = x W + b, W is in x out.
class Linear {
 public:
  Linear(const std::string& name, int in, int out, ParamSet& ps, std::mt19937_64& rng,
         bool zero_init = false)
      : w(name + ".w", in, out), b(name + ".b", 1, out) {
    if (!zero_init) uniform_init(w.value, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    ps.add(&w);
    ps.add(&b);
  }

  Tensor2D forward(const Tensor2D& x) {
    last_x_ = x;
    Tensor2D y = matmul(x, w.value);
    for (int r = 0; r < y.rows; ++r)
      for (int c = 0; c < y.cols; ++c) y(r, c) += b.value(0, c);
    return y;
  }

  Tensor2D backward(const Tensor2D& dy) {
    add_inplace(w.grad, matmul_tn(last_x_, dy));
    for (int r = 0; r < dy.rows; ++r)
      for (int c = 0; c < dy.cols; ++c) b.grad(0, c) += dy(r, c);
    return matmul_nt(dy, w.value);
  }

  Param w, b;

 private:
  Tensor2D last_x_;
};

// 1-D convolution along the time axis, same padding, odd kernel, optional
// dilation. Weight layout: (kernel * c_in) x c_out, taps stacked by row.
class Conv1D {
 public:
  Conv1D(const std::string& name, int c_in, int c_out, int kernel, int dilation, ParamSet& ps,
         std::mt19937_64& rng)
      : w(name + ".w", kernel * c_in, c_out), b(name + ".b", 1, c_out),
        c_in_(c_in), c_out_(c_out), kernel_(kernel), dilation_(dilation) {
    uniform_init(w.value, 1.0 / std::sqrt(static_cast<double>(kernel * c_in)), rng);
    ps.add(&w);
    ps.add(&b);
  }

  Tensor2D forward(const Tensor2D& x);
  Tensor2D backward(const Tensor2D& dy);

  Param w, b;

 private:
  int c_in_, c_out_, kernel_, dilation_;
  Tensor2D cols_;  // im2col buffer of the last forward
  int last_rows_ = 0;
};

// Strided 1-D convolution used by the pyramid: kernel 2*factor, stride
// factor, input zero-padded on the right. Output length ceil(rows/factor).
class StridedConv {
 public:
  StridedConv(const std::string& name, int c_in, int c_out, int factor, ParamSet& ps,
              std::mt19937_64& rng)
      : w(name + ".w", 2 * factor * c_in, c_out), b(name + ".b", 1, c_out),
        c_in_(c_in), c_out_(c_out), factor_(factor) {
    uniform_init(w.value, 1.0 / std::sqrt(static_cast<double>(2 * factor * c_in)), rng);
    ps.add(&w);
    ps.add(&b);
  }

  Tensor2D forward(const Tensor2D& x);
  Tensor2D backward(const Tensor2D& dy);

  int factor() const { return factor_; }

  Param w, b;

 private:
  int c_in_, c_out_, factor_;
  Tensor2D cols_;
  int last_rows_ = 0;
};

// Gated convolution block: y = x + P(tanh(F(x)) * sigmoid(G(x))) with F, G
// kernel-3 convolutions and P a 1x1 projection.
class GatedConvBlock {
 public:
  GatedConvBlock(const std::string& name, int channels, int dilation, ParamSet& ps,
                 std::mt19937_64& rng)
      : filter_(name + ".filter", channels, channels, 3, dilation, ps, rng),
        gate_(name + ".gate", channels, channels, 3, dilation, ps, rng),
        proj_(name + ".proj", channels, channels, ps, rng) {}

  Tensor2D forward(const Tensor2D& x);
  Tensor2D backward(const Tensor2D& dy);

  Conv1D filter_, gate_;
  Linear proj_;

 private:
  Tensor2D tanh_f_, sig_g_;
};

// Per-row layer normalization over channels, eps 1e-5, no learned affine.
class LayerNorm {
 public:
  explicit LayerNorm(double eps = 1e-5) : eps_(eps) {}

  Tensor2D forward(const Tensor2D& x);
  Tensor2D backward(const Tensor2D& dy);

 private:
  double eps_;
  Tensor2D normed_;
  std::vector<double> inv_std_;
};

// Sinusoidal step embedding: [sin(t / 10000^(2i/dim)), cos(...)], dim even.
std::vector<double> step_embedding(int t, int dim);

// Global L2-norm clipping over a set of gradients; returns the pre-clip norm.
double clip_grad_norm(ParamSet& ps, double max_norm);

// AdamW with decoupled weight decay: params are scaled by (1 - lr*lambda)
// before the bias-corrected Adam update. Throws on non-finite gradients.
class AdamW {
 public:
  struct Config {
    double lr = 1e-4;
    double beta1 = 0.8;
    double beta2 = 0.99;
    double weight_decay = 0.01;
    double eps = 1e-8;
  };

  AdamW() : cfg_() {}
  explicit AdamW(const Config& cfg) : cfg_(cfg) {}

  void step(ParamSet& ps);
  int step_count() const { return t_; }
  const Config& config() const { return cfg_; }
  Config& config() { return cfg_; }

 private:
  Config cfg_;
  int t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace prosody
