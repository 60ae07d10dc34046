// SPDX-License-Identifier: Apache-2.0
#include "prosody/nn.hpp"

#include <stdexcept>

namespace prosody {

Tensor2D Conv1D::forward(const Tensor2D& x) {
  if (x.cols != c_in_) throw std::invalid_argument("Conv1D: channel mismatch");
  last_rows_ = x.rows;
  const int half = kernel_ / 2;
  cols_ = Tensor2D(x.rows, kernel_ * c_in_);
  for (int r = 0; r < x.rows; ++r) {
    for (int k = 0; k < kernel_; ++k) {
      const int src = r + (k - half) * dilation_;
      if (src < 0 || src >= x.rows) continue;  // zero padding
      for (int c = 0; c < c_in_; ++c) cols_(r, k * c_in_ + c) = x(src, c);
    }
  }
  Tensor2D y = matmul(cols_, w.value);
  for (int r = 0; r < y.rows; ++r)
    for (int c = 0; c < c_out_; ++c) y(r, c) += b.value(0, c);
  return y;
}

Tensor2D Conv1D::backward(const Tensor2D& dy) {
  add_inplace(w.grad, matmul_tn(cols_, dy));
  for (int r = 0; r < dy.rows; ++r)
    for (int c = 0; c < c_out_; ++c) b.grad(0, c) += dy(r, c);
  const Tensor2D dcols = matmul_nt(dy, w.value);
  Tensor2D dx(last_rows_, c_in_);
  const int half = kernel_ / 2;
  for (int r = 0; r < last_rows_; ++r) {
    for (int k = 0; k < kernel_; ++k) {
      const int src = r + (k - half) * dilation_;
      if (src < 0 || src >= last_rows_) continue;
      for (int c = 0; c < c_in_; ++c) dx(src, c) += dcols(r, k * c_in_ + c);
    }
  }
  return dx;
}

Tensor2D StridedConv::forward(const Tensor2D& x) {
  if (x.cols != c_in_) throw std::invalid_argument("StridedConv: channel mismatch");
  last_rows_ = x.rows;
  const int out_rows = (x.rows + factor_ - 1) / factor_;
  const int kernel = 2 * factor_;
  cols_ = Tensor2D(out_rows, kernel * c_in_);
  for (int r = 0; r < out_rows; ++r) {
    const int start = r * factor_;
    for (int k = 0; k < kernel; ++k) {
      const int src = start + k;
      if (src >= x.rows) break;  // right zero padding
      for (int c = 0; c < c_in_; ++c) cols_(r, k * c_in_ + c) = x(src, c);
    }
  }
  Tensor2D y = matmul(cols_, w.value);
  for (int r = 0; r < y.rows; ++r)
    for (int c = 0; c < c_out_; ++c) y(r, c) += b.value(0, c);
  return y;
}

Tensor2D StridedConv::backward(const Tensor2D& dy) {
  add_inplace(w.grad, matmul_tn(cols_, dy));
  for (int r = 0; r < dy.rows; ++r)
    for (int c = 0; c < c_out_; ++c) b.grad(0, c) += dy(r, c);
  const Tensor2D dcols = matmul_nt(dy, w.value);
  Tensor2D dx(last_rows_, c_in_);
  const int kernel = 2 * factor_;
  for (int r = 0; r < dy.rows; ++r) {
    const int start = r * factor_;
    for (int k = 0; k < kernel; ++k) {
      const int src = start + k;
      if (src >= last_rows_) break;
      for (int c = 0; c < c_in_; ++c) dx(src, c) += dcols(r, k * c_in_ + c);
    }
  }
  return dx;
}

Tensor2D GatedConvBlock::forward(const Tensor2D& x) {
  Tensor2D f = filter_.forward(x);
  Tensor2D g = gate_.forward(x);
  tanh_f_ = Tensor2D(f.rows, f.cols);
  sig_g_ = Tensor2D(g.rows, g.cols);
  Tensor2D a(f.rows, f.cols);
  for (size_t i = 0; i < f.v.size(); ++i) {
    tanh_f_.v[i] = std::tanh(f.v[i]);
    sig_g_.v[i] = 1.0 / (1.0 + std::exp(-g.v[i]));
    a.v[i] = tanh_f_.v[i] * sig_g_.v[i];
  }
  Tensor2D y = proj_.forward(a);
  add_inplace(y, x);
  return y;
}

Tensor2D GatedConvBlock::backward(const Tensor2D& dy) {
  Tensor2D da = proj_.backward(dy);
  Tensor2D df(da.rows, da.cols), dg(da.rows, da.cols);
  for (size_t i = 0; i < da.v.size(); ++i) {
    df.v[i] = da.v[i] * sig_g_.v[i] * (1.0 - tanh_f_.v[i] * tanh_f_.v[i]);
    dg.v[i] = da.v[i] * tanh_f_.v[i] * sig_g_.v[i] * (1.0 - sig_g_.v[i]);
  }
  Tensor2D dx = filter_.backward(df);
  add_inplace(dx, gate_.backward(dg));
  add_inplace(dx, dy);  // residual
  return dx;
}

Tensor2D LayerNorm::forward(const Tensor2D& x) {
  if (x.cols < 2) throw std::invalid_argument("LayerNorm: needs at least 2 channels");
  normed_ = Tensor2D(x.rows, x.cols);
  inv_std_.assign(x.rows, 0.0);
  for (int r = 0; r < x.rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < x.cols; ++c) mean += x(r, c);
    mean /= x.cols;
    double var = 0.0;
    for (int c = 0; c < x.cols; ++c) {
      const double d = x(r, c) - mean;
      var += d * d;
    }
    var /= x.cols;
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std_[r] = inv;
    for (int c = 0; c < x.cols; ++c) normed_(r, c) = (x(r, c) - mean) * inv;
  }
  return normed_;
}

Tensor2D LayerNorm::backward(const Tensor2D& dy) {
  Tensor2D dx(dy.rows, dy.cols);
  const int d = dy.cols;
  for (int r = 0; r < dy.rows; ++r) {
    double sum_dy = 0.0, sum_dy_n = 0.0;
    for (int c = 0; c < d; ++c) {
      sum_dy += dy(r, c);
      sum_dy_n += dy(r, c) * normed_(r, c);
    }
    for (int c = 0; c < d; ++c)
      dx(r, c) = inv_std_[r] * (dy(r, c) - sum_dy / d - normed_(r, c) * sum_dy_n / d);
  }
  return dx;
}

std::vector<double> step_embedding(int t, int dim) {
  if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("step_embedding: dim must be even >= 2");
  std::vector<double> e(dim);
  for (int i = 0; i < dim / 2; ++i) {
    const double freq = std::pow(10000.0, -2.0 * i / dim);
    e[i] = std::sin(t * freq);
    e[dim / 2 + i] = std::cos(t * freq);
  }
  return e;
}

double clip_grad_norm(ParamSet& ps, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("clip_grad_norm: max_norm must be positive");
  double sq = 0.0;
  for (const Param* p : ps.items)
    for (double g : p->grad.v) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (Param* p : ps.items)
      for (double& g : p->grad.v) g *= scale;
  }
  return norm;
}

void AdamW::step(ParamSet& ps) {
  if (!ps.grads_finite()) throw std::runtime_error("AdamW: non-finite gradient");
  if (m_.empty()) {
    m_.resize(ps.items.size());
    v_.resize(ps.items.size());
    for (size_t i = 0; i < ps.items.size(); ++i) {
      m_[i].assign(ps.items[i]->value.size(), 0.0);
      v_[i].assign(ps.items[i]->value.size(), 0.0);
    }
  }
  if (m_.size() != ps.items.size()) throw std::runtime_error("AdamW: param set changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  const double decay = 1.0 - cfg_.lr * cfg_.weight_decay;
  for (size_t i = 0; i < ps.items.size(); ++i) {
    Param& p = *ps.items[i];
    for (size_t j = 0; j < p.value.size(); ++j) {
      p.value.v[j] *= decay;
      const double g = p.grad.v[j];
      m_[i][j] = cfg_.beta1 * m_[i][j] + (1.0 - cfg_.beta1) * g;
      v_[i][j] = cfg_.beta2 * v_[i][j] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m_[i][j] / bc1;
      const double vhat = v_[i][j] / bc2;
      p.value.v[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    if (!p.value.finite()) throw std::runtime_error("AdamW: non-finite parameter after step");
  }
}

}  // namespace prosody
