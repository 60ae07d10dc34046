// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "prosody/nn.hpp"
#include "prosody/tensor.hpp"

namespace prosody::testutil {

// Central finite differences against the gradients accumulated by one
// backward pass. loss(true) must run forward + backward into ps; loss(false)
// must only evaluate. The loss has to be deterministic.
inline double gradcheck_params(ParamSet& ps, const std::function<double(bool)>& loss,
                               double h = 1e-5) {
  ps.zero_grad();
  loss(true);
  std::vector<std::vector<double>> saved;
  for (Param* p : ps.items) saved.push_back(p->grad.v);

  double worst = 0.0;
  for (size_t pi = 0; pi < ps.items.size(); ++pi) {
    Param* p = ps.items[pi];
    for (size_t i = 0; i < p->value.v.size(); ++i) {
      const double orig = p->value.v[i];
      p->value.v[i] = orig + h;
      const double lp = loss(false);
      p->value.v[i] = orig - h;
      const double lm = loss(false);
      p->value.v[i] = orig;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = saved[pi][i];
      // Differences below 1e-8 are central-difference roundoff noise, which
      // otherwise swamps parameters whose true gradient is exactly zero.
      if (std::abs(an - fd) < 1e-8) continue;
      const double rel = std::abs(an - fd) / std::max(std::abs(an) + std::abs(fd), 1e-6);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

// Same idea for the gradient w.r.t. a tensor input. analytic must hold the
// input gradient produced by the recorded backward pass.
inline double gradcheck_input(Tensor2D& x, const Tensor2D& analytic,
                              const std::function<double()>& loss, double h = 1e-5) {
  double worst = 0.0;
  for (size_t i = 0; i < x.v.size(); ++i) {
    const double orig = x.v[i];
    x.v[i] = orig + h;
    const double lp = loss();
    x.v[i] = orig - h;
    const double lm = loss();
    x.v[i] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    const double an = analytic.v[i];
    if (std::abs(an - fd) < 1e-8) continue;
    const double rel = std::abs(an - fd) / std::max(std::abs(an) + std::abs(fd), 1e-6);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace prosody::testutil
