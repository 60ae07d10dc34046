// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace prosody {

// Row-major 2-D tensor; rows are time steps, columns are channels.
struct Tensor2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor2D() = default;
  Tensor2D(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {
    if (r < 0 || c < 0) throw std::invalid_argument("Tensor2D: negative dims");
  }

  double& operator()(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

  size_t size() const { return v.size(); }
  bool empty() const { return v.empty(); }

  bool finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  void fill(double x) { std::fill(v.begin(), v.end(), x); }
};

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using CEMap = Eigen::Map<const EMat>;

inline EMap emap(Tensor2D& t) { return EMap(t.v.data(), t.rows, t.cols); }
inline CEMap emap(const Tensor2D& t) { return CEMap(t.v.data(), t.rows, t.cols); }

// c = a * b
inline Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: dim mismatch");
  Tensor2D c(a.rows, b.cols);
  emap(c).noalias() = emap(a) * emap(b);
  return c;
}

// c = a^T * b
inline Tensor2D matmul_tn(const Tensor2D& a, const Tensor2D& b) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: dim mismatch");
  Tensor2D c(a.cols, b.cols);
  emap(c).noalias() = emap(a).transpose() * emap(b);
  return c;
}

// c = a * b^T
inline Tensor2D matmul_nt(const Tensor2D& a, const Tensor2D& b) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: dim mismatch");
  Tensor2D c(a.rows, b.rows);
  emap(c).noalias() = emap(a) * emap(b).transpose();
  return c;
}

inline void add_inplace(Tensor2D& a, const Tensor2D& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("add: shape mismatch");
  emap(a) += emap(b);
}

}  // namespace prosody
