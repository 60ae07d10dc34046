// SPDX-License-Identifier: Apache-2.0
#include "prosody/diffusion.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prosody {

NoiseSchedule make_schedule(ScheduleKind kind, int T, double beta_start, double beta_end) {
  if (kind != ScheduleKind::linear) throw std::invalid_argument("make_schedule: unknown kind");
  if (T < 1) throw std::invalid_argument("make_schedule: T must be >= 1");
  if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_end < beta_start)
    throw std::invalid_argument("make_schedule: need 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.T = T;
  s.betas.resize(T);
  s.alphas.resize(T);
  s.alpha_bars.resize(T);
  s.posterior_vars.resize(T);
  double abar = 1.0;
  for (int i = 0; i < T; ++i) {
    const double frac = T == 1 ? 0.0 : static_cast<double>(i) / (T - 1);
    const double beta = beta_start + frac * (beta_end - beta_start);
    const double abar_prev = abar;
    s.betas[i] = beta;
    s.alphas[i] = 1.0 - beta;
    abar *= s.alphas[i];
    s.alpha_bars[i] = abar;
    s.posterior_vars[i] = (1.0 - abar_prev) / (1.0 - abar) * beta;
  }
  return s;
}

NoiseSchedule make_default_schedule(int T) {
  const double scale = 1000.0 / T;
  double start = 1e-4 * scale;
  double end = 0.02 * scale;
  end = std::min(end, 0.999);  // very small T would push beta past 1
  start = std::min(start, end);
  return make_schedule(ScheduleKind::linear, T, start, end);
}

static void check_t(int t, const NoiseSchedule& s) {
  if (t < 1 || t > s.T) throw std::out_of_range("diffusion: t out of [1, T]");
}

std::vector<double> forward_step(const std::vector<double>& x_prev, int t,
                                 const NoiseSchedule& sched, const std::vector<double>& noise) {
  check_t(t, sched);
  if (noise.size() != x_prev.size()) throw std::invalid_argument("forward_step: noise size mismatch");
  const double a = std::sqrt(1.0 - sched.beta(t));
  const double b = std::sqrt(sched.beta(t));
  std::vector<double> x(x_prev.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = a * x_prev[i] + b * noise[i];
  return x;
}

std::vector<double> forward_marginal(const std::vector<double>& x0, int t,
                                     const NoiseSchedule& sched, const std::vector<double>& noise) {
  if (t == 0) return x0;  // alpha_bar_0 = 1
  check_t(t, sched);
  if (noise.size() != x0.size()) throw std::invalid_argument("forward_marginal: noise size mismatch");
  const double a = std::sqrt(sched.alpha_bar(t));
  const double b = std::sqrt(1.0 - sched.alpha_bar(t));
  std::vector<double> x(x0.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = a * x0[i] + b * noise[i];
  return x;
}

std::vector<double> reverse_step(const std::vector<double>& x_t, int t, const Conditioning& cond,
                                 const NoiseSchedule& sched, EpsilonModel& model,
                                 const std::vector<double>& noise) {
  check_t(t, sched);
  const std::vector<double> eps = model.predict(x_t, t, cond);
  if (eps.size() != x_t.size()) throw std::runtime_error("reverse_step: model output size mismatch");
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
  const double eps_coef = (1.0 - sched.alpha(t)) / std::sqrt(1.0 - sched.alpha_bar(t));
  const double sigma = std::sqrt(sched.posterior_var(t));
  std::vector<double> x(x_t.size());
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = inv_sqrt_alpha * (x_t[i] - eps_coef * eps[i]);
    if (t > 1) x[i] += sigma * noise[i];
  }
  return x;
}

std::vector<double> sample(const Conditioning& cond, int length, const NoiseSchedule& sched,
                           EpsilonModel& model, std::mt19937_64& rng) {
  if (length < 1) throw std::invalid_argument("sample: length must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(length);
  for (double& v : x) v = gauss(rng);
  std::vector<double> noise(length, 0.0);
  for (int t = sched.T; t >= 1; --t) {
    if (t > 1)
      for (double& v : noise) v = gauss(rng);
    x = reverse_step(x, t, cond, sched, model, noise);
  }
  return x;
}

double diffusion_loss(const std::vector<LossBatchItem>& batch, const NoiseSchedule& sched,
                      TrainableEpsilonModel& model, std::mt19937_64& rng, bool train) {
  if (batch.empty()) throw std::invalid_argument("diffusion_loss: empty batch");
  std::uniform_int_distribution<int> t_dist(1, sched.T);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // First pass counts unmasked positions so gradients use the pooled mean.
  size_t total = 0;
  for (const auto& item : batch) {
    if (item.x0.empty()) throw std::invalid_argument("diffusion_loss: empty sequence");
    if (!item.mask.empty() && item.mask.size() != item.x0.size())
      throw std::invalid_argument("diffusion_loss: mask size mismatch");
    for (size_t i = 0; i < item.x0.size(); ++i)
      if (item.mask.empty() || item.mask[i]) ++total;
  }
  if (total == 0) throw std::invalid_argument("diffusion_loss: fully masked batch");

  double loss = 0.0;
  for (const auto& item : batch) {
    const int t = t_dist(rng);
    std::vector<double> eps(item.x0.size());
    for (double& e : eps) e = gauss(rng);
    const std::vector<double> x_t = forward_marginal(item.x0, t, sched, eps);
    const std::vector<double> pred = model.predict(x_t, t, *item.cond);
    std::vector<double> upstream(pred.size(), 0.0);
    for (size_t i = 0; i < pred.size(); ++i) {
      if (!item.mask.empty() && !item.mask[i]) continue;
      const double d = pred[i] - eps[i];
      loss += d * d;
      upstream[i] = 2.0 * d / static_cast<double>(total);
    }
    if (train) model.backward(upstream);
  }
  return loss / static_cast<double>(total);
}

void save_schedule(const NoiseSchedule& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "t beta alpha_bar posterior_var\n";
  f.precision(17);
  for (int t = 1; t <= s.T; ++t)
    f << t << " " << s.beta(t) << " " << s.alpha_bar(t) << " " << s.posterior_var(t) << "\n";
}

NoiseSchedule load_schedule(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(f, header);
  NoiseSchedule s;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int t;
    double beta, abar, pvar;
    if (!(row >> t >> beta >> abar >> pvar)) throw std::runtime_error("schedule: bad row");
    s.betas.push_back(beta);
    s.alphas.push_back(1.0 - beta);
    s.alpha_bars.push_back(abar);
    s.posterior_vars.push_back(pvar);
  }
  s.T = static_cast<int>(s.betas.size());
  if (s.T == 0) throw std::runtime_error("schedule: empty table");
  return s;
}

}  // namespace prosody
