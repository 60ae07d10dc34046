// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "prosody/tensor.hpp"

namespace prosody {

// beta/alpha/alpha_bar/posterior-variance tables for a T-step process.
// Index t in [1, T] maps to array slot t-1; alpha_bar_0 := 1.
struct NoiseSchedule {
  std::vector<double> betas;
  std::vector<double> alphas;
  std::vector<double> alpha_bars;
  std::vector<double> posterior_vars;  // sigma_t^2, exactly 0 at t = 1
  int T = 0;

  double beta(int t) const { return betas[t - 1]; }
  double alpha(int t) const { return alphas[t - 1]; }
  double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bars[t - 1]; }
  double posterior_var(int t) const { return posterior_vars[t - 1]; }
};

enum class ScheduleKind { linear };

// Linear beta ramp over T steps. Non-positive bounds reject; beta_end must
// stay below 1 and not undercut beta_start.
NoiseSchedule make_schedule(ScheduleKind kind, int T, double beta_start, double beta_end);

// Canonical 1e-4..0.02 range defined at 1000 steps, rescaled by 1000/T so
// alpha_bar_T stays near zero for any T.
NoiseSchedule make_default_schedule(int T);

// Single forward step: x_t = sqrt(1 - beta_t) x_{t-1} + sqrt(beta_t) eps.
std::vector<double> forward_step(const std::vector<double>& x_prev, int t,
                                 const NoiseSchedule& sched, const std::vector<double>& noise);

// Closed form: x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps.
std::vector<double> forward_marginal(const std::vector<double>& x0, int t,
                                     const NoiseSchedule& sched, const std::vector<double>& noise);

// Conditioning consumed by the denoiser: content already length-regulated to
// the frame axis, plus a global speaker vector.
struct Conditioning {
  Tensor2D content;             // frames x d_c
  std::vector<double> speaker;  // d_s
};

// Noise predictor interface: eps_hat(x_t, t, cond), sequence in, sequence out.
class EpsilonModel {
 public:
  virtual ~EpsilonModel() = default;
  virtual std::vector<double> predict(const std::vector<double>& x_t, int t,
                                      const Conditioning& cond) = 0;
};

// Trainable variant: forward must have been called before backward; backward
// accumulates parameter gradients from the upstream d(loss)/d(eps_hat).
class TrainableEpsilonModel : public EpsilonModel {
 public:
  virtual void backward(const std::vector<double>& upstream) = 0;
};

// One reverse step (t in [1, T]):
//   x_{t-1} = (x_t - ((1-alpha_t)/sqrt(1-abar_t)) eps_hat) / sqrt(alpha_t) + sigma_t z.
// noise is ignored at t = 1 (sigma_1 = 0).
std::vector<double> reverse_step(const std::vector<double>& x_t, int t, const Conditioning& cond,
                                 const NoiseSchedule& sched, EpsilonModel& model,
                                 const std::vector<double>& noise);

// Full reverse loop from x_T ~ N(0, I); deterministic given the rng state.
std::vector<double> sample(const Conditioning& cond, int length, const NoiseSchedule& sched,
                           EpsilonModel& model, std::mt19937_64& rng);

struct LossBatchItem {
  std::vector<double> x0;       // normalized contour values
  std::vector<uint8_t> mask;    // 1 = real frame; empty means all real
  const Conditioning* cond = nullptr;
};

// Simplified epsilon-prediction objective: per element, t ~ U[1,T] and
// eps ~ N(0,I); loss is the mean squared error over unmasked positions
// pooled across the batch. When train is true, gradients flow into model.
double diffusion_loss(const std::vector<LossBatchItem>& batch, const NoiseSchedule& sched,
                      TrainableEpsilonModel& model, std::mt19937_64& rng, bool train = true);

// Text table "t beta alpha_bar posterior_var" with one header line.
void save_schedule(const NoiseSchedule& s, const std::string& path);
NoiseSchedule load_schedule(const std::string& path);

}  // namespace prosody
