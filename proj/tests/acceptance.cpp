// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "gradcheck.hpp"
#include "prosody/adaptor.hpp"
#include "prosody/checkpoint.hpp"
#include "prosody/corpus.hpp"
#include "prosody/denoiser.hpp"
#include "prosody/diffusion.hpp"
#include "prosody/excitation.hpp"
#include "prosody/metrics.hpp"
#include "prosody/pipeline.hpp"

using namespace prosody;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << index << " (" << name << "): " << detail
            << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------- criterion 1

void criterion_marginal_consistency() {
  const auto start = Clock::now();
  const NoiseSchedule sched = make_default_schedule(100);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int draws = 10000;

  bool ok = true;
  std::string detail;
  for (int t_check : {10, 50, 100}) {
    double sum = 0.0, sq = 0.0;
    for (int d = 0; d < draws; ++d) {
      std::vector<double> x = {1.0};
      for (int t = 1; t <= t_check; ++t) x = forward_step(x, t, sched, {gauss(rng)});
      sum += x[0];
      sq += x[0] * x[0];
    }
    const double mean = sum / draws;
    const double std_emp = std::sqrt(std::max(0.0, sq / draws - mean * mean));
    const double mean_ref = std::sqrt(sched.alpha_bar(t_check));
    const double std_ref = std::sqrt(1.0 - sched.alpha_bar(t_check));
    const double mean_err = std::abs(mean - mean_ref) / std::max(std_ref, mean_ref);
    const double std_err = std::abs(std_emp - std_ref) / std_ref;
    if (mean_err > 0.02 || std_err > 0.02) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof buf, "t=%d mean_err=%.4f std_err=%.4f; ", t_check, mean_err, std_err);
    detail += buf;
  }
  const double secs = seconds_since(start);
  if (secs >= 5.0) ok = false;
  char buf[48];
  std::snprintf(buf, sizeof buf, "runtime=%.2fs", secs);
  report(1, "schedule/marginal consistency", ok, detail + buf);
}

// ---------------------------------------------------------------- criterion 2

class OracleDenoiser : public EpsilonModel {
 public:
  OracleDenoiser(std::vector<double> target, const NoiseSchedule& sched)
      : target_(std::move(target)), sched_(sched) {}
  std::vector<double> predict(const std::vector<double>& x_t, int t,
                              const Conditioning&) override {
    const double a = std::sqrt(sched_.alpha_bar(t));
    const double b = std::sqrt(1.0 - sched_.alpha_bar(t));
    std::vector<double> eps(x_t.size());
    for (size_t i = 0; i < eps.size(); ++i) eps[i] = (x_t[i] - a * target_[i]) / b;
    return eps;
  }

 private:
  std::vector<double> target_;
  const NoiseSchedule& sched_;
};

void criterion_perfect_denoiser() {
  const NoiseSchedule sched = make_default_schedule(100);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double worst_inv = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int t = 1 + int(rng() % 100);
    const double x0 = gauss(rng);
    const double eps = gauss(rng);
    const auto x_t = forward_marginal({x0}, t, sched, {eps});
    const double xhat0 =
        (x_t[0] - std::sqrt(1.0 - sched.alpha_bar(t)) * eps) / std::sqrt(sched.alpha_bar(t));
    worst_inv = std::max(worst_inv, std::abs(xhat0 - x0));
  }

  double worst_rmse = 0.0;
  Conditioning cond;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> target(60);
    for (double& v : target) v = gauss(rng);
    OracleDenoiser oracle(target, sched);
    const auto out = sample(cond, 60, sched, oracle, rng);
    double mse = 0.0;
    for (size_t i = 0; i < target.size(); ++i) mse += (out[i] - target[i]) * (out[i] - target[i]);
    worst_rmse = std::max(worst_rmse, std::sqrt(mse / target.size()));
  }

  char buf[96];
  std::snprintf(buf, sizeof buf, "inversion_err=%.2e sampling_rmse=%.2e", worst_inv, worst_rmse);
  report(2, "perfect-denoiser inversion", worst_inv < 1e-9 && worst_rmse < 1e-6, buf);
}

// ---------------------------------------------------------------- criterion 3

double sq_sum(const Tensor2D& t) {
  double s = 0.0;
  for (double x : t.v) s += x * x;
  return s;
}

Tensor2D two_t(const Tensor2D& t) {
  Tensor2D d = t;
  for (double& x : d.v) x *= 2.0;
  return d;
}

Tensor2D random_tensor(int r, int c, std::mt19937_64& rng, double scale = 1.0) {
  Tensor2D t(r, c);
  std::normal_distribution<double> g(0.0, scale);
  for (double& x : t.v) x = g(rng);
  return t;
}

void criterion_gradients() {
  const auto start = Clock::now();
  std::mt19937_64 rng(3);
  double worst = 0.0;
  std::string detail;

  auto track = [&](const char* name, double err) {
    worst = std::max(worst, err);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.1e ", name, err);
    detail += buf;
  };

  {
    ParamSet ps;
    Linear lin("l", 5, 4, ps, rng);
    const Tensor2D x = random_tensor(6, 5, rng);
    track("linear", testutil::gradcheck_params(ps, [&](bool bw) {
      const Tensor2D y = lin.forward(x);
      if (bw) lin.backward(two_t(y));
      return sq_sum(y);
    }));
  }
  {
    ParamSet ps;
    Conv1D conv("c", 3, 3, 3, 2, ps, rng);
    const Tensor2D x = random_tensor(10, 3, rng);
    track("conv1d", testutil::gradcheck_params(ps, [&](bool bw) {
      const Tensor2D y = conv.forward(x);
      if (bw) conv.backward(two_t(y));
      return sq_sum(y);
    }));
  }
  {
    ParamSet ps;
    StridedConv conv("s", 2, 2, 5, ps, rng);
    const Tensor2D x = random_tensor(12, 2, rng);
    track("strided", testutil::gradcheck_params(ps, [&](bool bw) {
      const Tensor2D y = conv.forward(x);
      if (bw) conv.backward(two_t(y));
      return sq_sum(y);
    }));
  }
  {
    ParamSet ps;
    GatedConvBlock block("g", 4, 1, ps, rng);
    const Tensor2D x = random_tensor(8, 4, rng);
    track("gated", testutil::gradcheck_params(ps, [&](bool bw) {
      const Tensor2D y = block.forward(x);
      if (bw) block.backward(two_t(y));
      return sq_sum(y);
    }));
  }
  {
    ParamSet ps;
    CrossAttention attn("a", 4, 3, 4, ps, rng);
    std::normal_distribution<double> g(0.0, 0.3);
    for (Param* p : ps.items)
      for (double& v : p->value.v) v += g(rng);
    const Tensor2D q = random_tensor(5, 4, rng);
    const Tensor2D kv = random_tensor(6, 3, rng);
    track("attention", testutil::gradcheck_params(ps, [&](bool bw) {
      const Tensor2D y = attn.forward(q, kv);
      if (bw) {
        Tensor2D d_kv;
        attn.backward(two_t(y), d_kv);
      }
      return sq_sum(y);
    }));
  }
  {
    ParamSet ps;
    Saln saln("s", 5, 3, ps, rng, /*zero_init_maps=*/false);
    const Tensor2D h = random_tensor(6, 5, rng);
    const std::vector<double> speaker = {0.2, -0.3, 0.4};
    track("saln", testutil::gradcheck_params(ps, [&](bool bw) {
      const Tensor2D y = saln.forward(h, speaker);
      if (bw) saln.backward(two_t(y));
      return sq_sum(y);
    }));
  }
  {
    // Composed denoiser, hidden 8, time 16.
    DenoiserConfig cfg;
    cfg.hidden = 8;
    cfg.d_content = 4;
    cfg.d_speaker = 3;
    cfg.step_dim = 8;
    cfg.blocks = 2;
    Denoiser model(cfg, rng);
    std::normal_distribution<double> g(0.0, 0.3);
    for (Param* p : model.params().items)
      for (double& v : p->value.v) v += g(rng);
    const Tensor2D x = random_tensor(16, 1, rng);
    const Tensor2D content = random_tensor(16, 4, rng);
    const std::vector<double> speaker = {0.1, -0.2, 0.3};
    track("denoiser", testutil::gradcheck_params(model.params(), [&](bool bw) {
      const Tensor2D y = model.forward(x, 3, content, speaker);
      if (bw) model.backward_tensor(two_t(y));
      return sq_sum(y);
    }));
  }
  {
    // Composed adaptor, both paths.
    AdaptorConfig cfg;
    cfg.d_content = 4;
    cfg.d_speaker = 3;
    cfg.d_attn = 4;
    cfg.pyramid_channels = 2;
    ParamSet ps;
    AdaptorModel model(cfg, ps, rng);
    std::normal_distribution<double> g(0.0, 0.2);
    for (Param* p : ps.items)
      for (double& v : p->value.v) v += g(rng);
    ConditionBundle b;
    b.content = random_tensor(3, 4, rng);
    b.speaker = {0.3, -0.1, 0.2};
    b.durations = {2, 3, 2};
    ExcitationSignal sig;
    sig.samples.resize(7 * 200);
    std::normal_distribution<double> gs(0.0, 1.0);
    for (double& x : sig.samples) x = gs(rng);
    track("adaptor", testutil::gradcheck_params(ps, [&](bool bw) {
      const AdaptorOutput out = model.adapt(b, sig);
      if (bw) model.backward(two_t(out.fused));
      return sq_sum(out.fused);
    }));
    std::vector<double> f0(7);
    for (double& x : f0) x = gs(rng);
    track("adaptor_flat", testutil::gradcheck_params(ps, [&](bool bw) {
      const AdaptorOutput out = model.adapt_flat(b, f0);
      if (bw) model.backward(two_t(out.fused));
      return sq_sum(out.fused);
    }));
  }

  const double secs = seconds_since(start);
  char buf[64];
  std::snprintf(buf, sizeof buf, "max=%.1e runtime=%.1fs", worst, secs);
  report(3, "gradient correctness", worst < 1e-5 && secs < 30.0, detail + buf);
}

// ---------------------------------------------------------------- criterion 4

void criterion_excitation() {
  SampleTrack track;
  track.sample_rate = 16000;
  track.f0.assign(16000, 200.0);
  track.gate.assign(16000, 1);
  for (int n = 4000; n < 4800; ++n) track.gate[n] = 0;  // carve an unvoiced run
  const ExcitationSignal sig = synthesize(track);

  bool unvoiced_zero = true;
  for (int n = 4000; n < 4800; ++n) unvoiced_zero &= sig.samples[n] == 0.0;

  // Spectrum over the fully voiced 0.5 s head.
  const std::vector<double> head(sig.samples.begin(), sig.samples.begin() + 4000);
  auto bin_mag = [&](double freq) {
    double re = 0.0, im = 0.0;
    const double w = 2.0 * M_PI * freq / 16000.0;
    for (size_t n = 0; n < head.size(); ++n) {
      re += head[n] * std::cos(w * n);
      im -= head[n] * std::sin(w * n);
    }
    return std::hypot(re, im);
  };
  const double fundamental = bin_mag(200.0);
  bool harmonics_present = true;
  for (int k = 2; k <= 40; k += 7) harmonics_present &= bin_mag(k * 200.0) > 0.5 * fundamental;
  double worst_off = 0.0;
  for (double freq : {104.0, 304.0, 504.0, 1096.0, 3304.0, 5096.0, 7904.0})
    worst_off = std::max(worst_off, bin_mag(freq) / fundamental);

  const bool caps = harmonic_count(100, 16000, 200) == 80 && harmonic_count(30, 16000, 200) == 200;

  char buf[96];
  std::snprintf(buf, sizeof buf, "off_peak=%.3f caps=%d unvoiced_zero=%d", worst_off, int(caps),
                int(unvoiced_zero));
  report(4, "excitation DSP", worst_off < 0.05 && caps && unvoiced_zero && harmonics_present, buf);
}

// ---------------------------------------------------------------- criterion 5

void criterion_pyramid() {
  std::mt19937_64 rng(5);
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const long n = 1 + long(rng() % 1000000);
    const auto lens = pyramid_lengths(n);
    long cur = n;
    for (int i = 0; i < 4; ++i) {
      cur = (cur + kPyramidFactors[i] - 1) / kPyramidFactors[i];
      if (lens[i] != cur) ok = false;
    }
    if (lens[1] != (n + 199) / 200) ok = false;  // hop-200 frame count
  }
  report(5, "pyramid arithmetic", ok, "1000 random lengths in [1, 1e6]");
}

// ---------------------------------------------------------------- criterion 6

struct TrainingArtifacts {
  RunConfig cfg;
  Corpus corpus;
  TrainPitchResult train;
  double runtime_s = 0.0;
};

TrainingArtifacts g_training;  // shared with criterion 8

void criterion_training_smoke(const std::string& work_dir) {
  const auto start = Clock::now();
  RunConfig cfg;  // defaults: 512 utterances, 5000 steps, batch 16
  cfg.validate();
  g_training.cfg = cfg;
  g_training.corpus = generate_corpus(cfg, 42);
  g_training.train =
      train_pitch_predictor(cfg, g_training.corpus, 42, work_dir + "/pitch", PitchHead::diffusion);
  g_training.runtime_s = seconds_since(start);

  LoadedPredictor lp = load_predictor(g_training.train.checkpoint_path);
  const auto& held_out = g_training.corpus.val;
  const SampleResult s = sample_contours(g_training.corpus, lp, held_out, 4242,
                                         work_dir + "/samples");

  const bool loss_drop = g_training.train.final_avg <= 0.5 * g_training.train.early_avg;
  const bool beats_baseline = s.rmse_hz < s.baseline_rmse_hz;
  const bool in_time = g_training.runtime_s < 900.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "early=%.3f final=%.3f rmse=%.1fHz baseline=%.1fHz runtime=%.0fs",
                g_training.train.early_avg, g_training.train.final_avg, s.rmse_hz,
                s.baseline_rmse_hz, g_training.runtime_s);
  report(6, "training smoke", loss_drop && beats_baseline && in_time, buf);
}

// ---------------------------------------------------------------- criterion 7

void criterion_ablation(const std::string& work_dir) {
  RunConfig cfg;
  cfg.validate();
  int hier_wins = 0;
  bool diffusion_diverse = true, regressor_flat = true;
  std::string detail;
  for (int run = 0; run < 3; ++run) {
    const uint64_t seed = 1000 + 37 * run;
    const auto rows = run_ablation(cfg, seed, work_dir + "/ablate_" + std::to_string(run));
    const AblationRow& full = rows[0];
    const AblationRow& reg = rows[1];
    const AblationRow& flat = rows[2];
    if (!(full.diversity_hz > 0.0)) diffusion_diverse = false;
    if (!(reg.diversity_hz < 1e-9)) regressor_flat = false;
    const bool win = full.probe_mse < flat.probe_mse && full.probe_jitter < flat.probe_jitter;
    hier_wins += win;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "run%d: div=%.2f/%.2f probe=%.4f/%.4f jit=%.3f/%.3f; ", run, full.diversity_hz,
                  reg.diversity_hz, full.probe_mse, flat.probe_mse, full.probe_jitter,
                  flat.probe_jitter);
    detail += buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "hier_wins=%d/3", hier_wins);
  report(7, "ablation directions", diffusion_diverse && regressor_flat && hier_wins >= 2,
         detail + buf);
}

// ---------------------------------------------------------------- criterion 8

void criterion_determinism(const std::string& work_dir) {
  // Byte-identical CSVs for a repeated fixed-seed sampling run.
  LoadedPredictor lp1 = load_predictor(g_training.train.checkpoint_path);
  LoadedPredictor lp2 = load_predictor(g_training.train.checkpoint_path);
  std::vector<SyntheticUtterance> utts(g_training.corpus.test.begin(),
                                       g_training.corpus.test.begin() + 8);
  sample_contours(g_training.corpus, lp1, utts, 777, work_dir + "/det_a");
  sample_contours(g_training.corpus, lp2, utts, 777, work_dir + "/det_b");
  bool identical = true;
  for (const auto& e : fs::recursive_directory_iterator(work_dir + "/det_a")) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), work_dir + "/det_a").string();
    if (fnv1a_file(e.path().string()) !=
        fnv1a_file((fs::path(work_dir + "/det_b") / rel).string()))
      identical = false;
  }

  // Reloaded checkpoint reproduces the recorded validation loss.
  const Manifest m = read_manifest(g_training.train.checkpoint_path);
  const double recorded = std::stod(m.at("val_loss"));
  LoadedPredictor lp = load_predictor(g_training.train.checkpoint_path);
  const NoiseSchedule sched = schedule_from_config(g_training.cfg);
  const uint64_t eval_seed = 42ULL ^ 0x9e3779b97f4a7c15ULL;
  const double replayed = eval_pitch_loss(g_training.cfg, g_training.corpus, g_training.corpus.val,
                                          *lp.model, sched, PitchHead::diffusion, eval_seed);
  const double diff = std::abs(replayed - recorded);

  char buf[96];
  std::snprintf(buf, sizeof buf, "csv_identical=%d val_loss_diff=%.2e", int(identical), diff);
  report(8, "determinism and serialization", identical && diff < 1e-6, buf);
}

// ---------------------------------------------------------------- criterion 9

void criterion_invariances() {
  std::mt19937_64 rng(9);
  bool ok = true;
  std::string detail;

  {
    ParamSet ps;
    Saln saln("s", 6, 3, ps, rng, /*zero_init_maps=*/false);
    const std::vector<double> speaker = {0.3, -0.2, 0.5};
    const Tensor2D h = random_tensor(7, 6, rng);
    const Tensor2D base = saln.forward(h, speaker);
    Tensor2D shifted = h;
    for (double& x : shifted.v) x += 2.5;
    const Tensor2D s_out = saln.forward(shifted, speaker);
    Tensor2D scaled = h;
    for (double& x : scaled.v) x *= 4.0;
    const Tensor2D c_out = saln.forward(scaled, speaker);
    double shift_err = 0.0, scale_err = 0.0;
    for (size_t i = 0; i < base.v.size(); ++i) {
      shift_err = std::max(shift_err, std::abs(s_out.v[i] - base.v[i]));
      scale_err = std::max(scale_err, std::abs(c_out.v[i] - base.v[i]));
    }
    if (shift_err > 1e-6 || scale_err > 1e-4) ok = false;
    char buf[64];
    std::snprintf(buf, sizeof buf, "shift=%.1e scale=%.1e ", shift_err, scale_err);
    detail += buf;
  }
  {
    ParamSet ps;
    CrossAttention attn("a", 4, 3, 8, ps, rng);
    std::normal_distribution<double> g(0.0, 0.5);
    for (Param* p : ps.items)
      for (double& v : p->value.v) v += g(rng);
    const Tensor2D q = random_tensor(6, 4, rng);
    const Tensor2D kv = random_tensor(9, 3, rng);
    attn.forward(q, kv);
    double row_err = 0.0;
    for (int r = 0; r < 6; ++r) {
      double sum = 0.0;
      for (int c = 0; c < 9; ++c) sum += attn.last_attention()(r, c);
      row_err = std::max(row_err, std::abs(sum - 1.0));
    }
    if (row_err > 1e-6) ok = false;
    char buf[48];
    std::snprintf(buf, sizeof buf, "attn_rows=%.1e ", row_err);
    detail += buf;
  }
  {
    AdaptorConfig cfg;
    cfg.d_content = 4;
    cfg.d_speaker = 3;
    cfg.d_attn = 4;
    cfg.pyramid_channels = 2;
    ParamSet ps;
    AdaptorModel model(cfg, ps, rng);
    ConditionBundle b;
    b.content = random_tensor(3, 4, rng);
    b.speaker = {0.2, -0.4, 0.1};
    b.durations = {2, 3, 2};
    ExcitationSignal sig;
    sig.samples.resize(7 * 200);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& x : sig.samples) x = g(rng);
    const Tensor2D regulated = length_regulate(b.content, b.durations);
    const AdaptorOutput out = model.adapt(b, sig);
    const bool exact = out.fused.v == regulated.v;
    if (!exact) ok = false;
    detail += exact ? "adapt_identity=exact" : "adapt_identity=VIOLATED";
  }
  report(9, "invariance suite", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string work_dir = argc > 1 ? argv[1] : "acceptance_work";
  fs::create_directories(work_dir);

  criterion_marginal_consistency();
  criterion_perfect_denoiser();
  criterion_gradients();
  criterion_excitation();
  criterion_pyramid();
  criterion_training_smoke(work_dir);
  criterion_ablation(work_dir);
  criterion_determinism(work_dir);
  criterion_invariances();

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << std::endl;
  return failures;
}
