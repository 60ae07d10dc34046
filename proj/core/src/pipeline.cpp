// SPDX-License-Identifier: Apache-2.0
#include "prosody/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "prosody/checkpoint.hpp"
#include "prosody/metrics.hpp"

namespace fs = std::filesystem;

namespace prosody {

std::vector<double> normalized_target(const F0Contour& contour, const NormStats& stats) {
  const InterpolationResult interp = interpolate_unvoiced(contour);
  if (interp.all_unvoiced) return std::vector<double>(contour.frames(), 0.0);
  return normalize(interp.contour, stats).z_values;
}

Conditioning make_conditioning(const Corpus& corpus, const SyntheticUtterance& u) {
  Conditioning c;
  c.content = corpus.regulated_content(u);
  c.speaker = corpus.speakers[u.speaker].embedding;
  return c;
}

static ConditionBundle make_bundle(const Corpus& corpus, const SyntheticUtterance& u) {
  ConditionBundle b;
  b.content = Tensor2D(static_cast<int>(u.tokens.size()), corpus.token_table.cols);
  for (size_t i = 0; i < u.tokens.size(); ++i)
    for (int c = 0; c < corpus.token_table.cols; ++c)
      b.content(static_cast<int>(i), c) = corpus.token_table(u.tokens[i], c);
  b.speaker = corpus.speakers[u.speaker].embedding;
  b.durations = u.durations;
  return b;
}

NoiseSchedule schedule_from_config(const RunConfig& cfg) {
  if (cfg.beta_start > 0.0 && cfg.beta_end > 0.0)
    return make_schedule(ScheduleKind::linear, cfg.diffusion_steps, cfg.beta_start, cfg.beta_end);
  return make_default_schedule(cfg.diffusion_steps);
}

static DenoiserConfig denoiser_config(const RunConfig& cfg) {
  DenoiserConfig d;
  d.hidden = cfg.hidden;
  d.d_content = cfg.d_content;
  d.d_speaker = cfg.d_speaker;
  d.step_dim = cfg.step_dim;
  d.blocks = cfg.blocks;
  d.input_grad_mode = cfg.input_grad_mode == "clip" ? DenoiserConfig::InputGradMode::clip
                                                    : DenoiserConfig::InputGradMode::stop;
  d.input_grad_max = cfg.input_grad_max;
  return d;
}

namespace {

// Direct regression pass: x input all zero, t = 0, prediction is the target.
std::vector<double> regressor_forward(Denoiser& model, int frames, const Conditioning& cond) {
  const std::vector<double> zeros(frames, 0.0);
  return model.predict(zeros, 0, cond);
}

double regressor_loss(Denoiser& model, const std::vector<double>& x0, const Conditioning& cond,
                      bool train, double batch_scale) {
  const std::vector<double> pred = regressor_forward(model, static_cast<int>(x0.size()), cond);
  double loss = 0.0;
  std::vector<double> upstream(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - x0[i];
    loss += d * d;
    upstream[i] = 2.0 * d / (pred.size() * batch_scale);
  }
  if (train) model.backward(upstream);
  return loss / pred.size();
}

struct PreparedUtterance {
  std::vector<double> x0;
  Conditioning cond;
};

std::vector<PreparedUtterance> prepare(const Corpus& corpus,
                                       const std::vector<SyntheticUtterance>& split) {
  std::vector<PreparedUtterance> out;
  out.reserve(split.size());
  for (const auto& u : split)
    out.push_back({normalized_target(u.contour, corpus.stats), make_conditioning(corpus, u)});
  return out;
}

Manifest predictor_manifest(const RunConfig& cfg, const Corpus& corpus, PitchHead head,
                            const NoiseSchedule& sched, double val_loss) {
  Manifest m;
  auto num = [](double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  };
  m["hidden"] = std::to_string(cfg.hidden);
  m["d_content"] = std::to_string(cfg.d_content);
  m["d_speaker"] = std::to_string(cfg.d_speaker);
  m["step_dim"] = std::to_string(cfg.step_dim);
  m["blocks"] = std::to_string(cfg.blocks);
  m["T"] = std::to_string(sched.T);
  m["beta_start"] = num(sched.betas.front());
  m["beta_end"] = num(sched.betas.back());
  m["domain"] = cfg.pitch_domain;
  m["mean"] = num(corpus.stats.mean);
  m["std"] = num(corpus.stats.std);
  m["head"] = head == PitchHead::diffusion ? "diffusion" : "regressor";
  m["input_grad_mode"] = cfg.input_grad_mode;
  m["val_loss"] = num(val_loss);
  return m;
}

}  // namespace

double eval_pitch_loss(const RunConfig& cfg, const Corpus& corpus,
                       const std::vector<SyntheticUtterance>& split, Denoiser& model,
                       const NoiseSchedule& sched, PitchHead head, uint64_t eval_seed) {
  const std::vector<PreparedUtterance> prepared = prepare(corpus, split);
  std::mt19937_64 rng(eval_seed);
  double total = 0.0;
  if (head == PitchHead::regressor) {
    for (const auto& p : prepared) total += regressor_loss(model, p.x0, p.cond, false, 1.0);
    return total / prepared.size();
  }
  // Average the per-utterance diffusion loss; one (t, eps) draw each from
  // the fixed eval stream keeps the value reproducible.
  for (const auto& p : prepared) {
    std::vector<LossBatchItem> one(1);
    one[0].x0 = p.x0;
    one[0].cond = &p.cond;
    total += diffusion_loss(one, sched, model, rng, /*train=*/false);
  }
  return total / prepared.size();
}

TrainPitchResult train_pitch_predictor(const RunConfig& cfg, const Corpus& corpus, uint64_t seed,
                                       const std::string& out_dir, PitchHead head) {
  fs::create_directories(out_dir);
  std::mt19937_64 rng(seed);
  Denoiser model(denoiser_config(cfg), rng);
  const NoiseSchedule sched = schedule_from_config(cfg);
  const std::vector<PreparedUtterance> train = prepare(corpus, corpus.train);
  if (train.empty()) throw std::runtime_error("train_pitch_predictor: empty train split");

  AdamW opt({cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.weight_decay});
  std::uniform_int_distribution<size_t> pick(0, train.size() - 1);

  const std::string ckpt_path = (fs::path(out_dir) / "checkpoint.bin").string();
  const std::string loss_path = (fs::path(out_dir) / "loss.csv").string();
  std::ofstream loss_csv(loss_path);
  loss_csv << "step,train_loss\n";
  loss_csv.precision(17);

  const uint64_t eval_seed = seed ^ 0x9e3779b97f4a7c15ULL;
  double early_sum = 0.0, window_sum = 0.0, final_sum = 0.0;
  int early_n = 0, window_n = 0, final_n = 0;
  double best_val = std::numeric_limits<double>::infinity();

  for (int step = 1; step <= cfg.train_steps; ++step) {
    model.params().zero_grad();
    double loss;
    if (head == PitchHead::diffusion) {
      std::vector<LossBatchItem> batch(cfg.batch);
      std::vector<const PreparedUtterance*> chosen(cfg.batch);
      for (int b = 0; b < cfg.batch; ++b) chosen[b] = &train[pick(rng)];
      for (int b = 0; b < cfg.batch; ++b) {
        batch[b].x0 = chosen[b]->x0;
        batch[b].cond = &chosen[b]->cond;
      }
      loss = diffusion_loss(batch, sched, model, rng, /*train=*/true);
    } else {
      loss = 0.0;
      for (int b = 0; b < cfg.batch; ++b) {
        const PreparedUtterance& p = train[pick(rng)];
        loss += regressor_loss(model, p.x0, p.cond, true, cfg.batch);
      }
      loss /= cfg.batch;
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("train_pitch_predictor: non-finite loss at step " +
                               std::to_string(step));
    if (cfg.grad_clip > 0.0) clip_grad_norm(model.params(), cfg.grad_clip);
    opt.step(model.params());

    if (step <= 100) {
      early_sum += loss;
      ++early_n;
    }
    if (step > cfg.train_steps - 100) {
      final_sum += loss;
      ++final_n;
    }
    window_sum += loss;
    ++window_n;
    if (step % cfg.log_every == 0) {
      loss_csv << step << "," << window_sum / window_n << "\n";
      window_sum = 0.0;
      window_n = 0;
    }
    if (step % cfg.eval_every == 0 || step == cfg.train_steps) {
      const auto& val_split = corpus.val.empty() ? corpus.train : corpus.val;
      const double val = eval_pitch_loss(cfg, corpus, val_split, model, sched, head, eval_seed);
      if (val < best_val) {
        best_val = val;
        save_checkpoint(ckpt_path, model.params(), predictor_manifest(cfg, corpus, head, sched, val));
      }
    }
  }

  TrainPitchResult r;
  r.early_avg = early_n ? early_sum / early_n : 0.0;
  r.final_avg = final_n ? final_sum / final_n : 0.0;
  r.best_val = best_val;
  r.checkpoint_path = ckpt_path;
  return r;
}

LoadedPredictor load_predictor(const std::string& checkpoint_path) {
  const Manifest m = read_manifest(checkpoint_path);
  auto get = [&](const std::string& key) {
    const auto it = m.find(key);
    if (it == m.end()) throw std::runtime_error("checkpoint: missing manifest key " + key);
    return it->second;
  };
  DenoiserConfig dcfg;
  dcfg.hidden = std::stoi(get("hidden"));
  dcfg.d_content = std::stoi(get("d_content"));
  dcfg.d_speaker = std::stoi(get("d_speaker"));
  dcfg.step_dim = std::stoi(get("step_dim"));
  dcfg.blocks = std::stoi(get("blocks"));

  LoadedPredictor lp;
  std::mt19937_64 dummy(0);
  lp.model = std::make_unique<Denoiser>(dcfg, dummy);
  load_checkpoint(checkpoint_path, lp.model->params());
  lp.schedule = make_schedule(ScheduleKind::linear, std::stoi(get("T")), std::stod(get("beta_start")),
                              std::stod(get("beta_end")));
  lp.stats.mean = std::stod(get("mean"));
  lp.stats.std = std::stod(get("std"));
  lp.stats.domain = get("domain") == "linear_hz" ? PitchDomain::linear_hz : PitchDomain::log_hz;
  lp.head = get("head") == "regressor" ? PitchHead::regressor : PitchHead::diffusion;
  return lp;
}

SampleResult sample_contours(const Corpus& corpus, LoadedPredictor& predictor,
                             const std::vector<SyntheticUtterance>& utts, uint64_t seed,
                             const std::string& out_dir, bool write_wavs) {
  fs::create_directories(fs::path(out_dir) / "contours");
  std::mt19937_64 rng(seed);
  SampleResult res;

  // Constant baseline: mean voiced f0 of the training split.
  double base_sum = 0.0;
  long base_n = 0;
  for (const auto& u : corpus.train)
    for (int i = 0; i < u.contour.frames(); ++i)
      if (u.contour.voiced[i]) {
        base_sum += u.contour.values[i];
        ++base_n;
      }
  const double baseline = base_n ? base_sum / base_n : 0.0;

  std::vector<std::string> emitted;
  double rmse_sum = 0.0, base_rmse_sum = 0.0;
  const double nyquist = 0.5 * corpus.config.sample_rate;
  for (size_t ui = 0; ui < utts.size(); ++ui) {
    const auto& u = utts[ui];
    const Conditioning cond = make_conditioning(corpus, u);
    const int frames = u.contour.frames();
    std::vector<double> z;
    if (predictor.head == PitchHead::diffusion)
      z = sample(cond, frames, predictor.schedule, *predictor.model, rng);
    else
      z = predictor.model->predict(std::vector<double>(frames, 0.0), 0, cond);

    NormalizedContour nc;
    nc.z_values = z;
    nc.mean = predictor.stats.mean;
    nc.std = predictor.stats.std;
    nc.domain = predictor.stats.domain;
    nc.hop = u.contour.hop;
    nc.sample_rate = u.contour.sample_rate;
    std::vector<double> hz = denormalize(nc).values_hz;
    for (int i = 0; i < frames; ++i) {
      if (!u.contour.voiced[i])
        hz[i] = 0.0;
      else
        hz[i] = std::clamp(hz[i], kMinVoicedHz, nyquist);
    }

    rmse_sum += voiced_rmse(hz, u.contour.values, u.contour.voiced);
    std::vector<double> base_pred(frames, baseline);
    base_rmse_sum += voiced_rmse(base_pred, u.contour.values, u.contour.voiced);

    char name[48];
    std::snprintf(name, sizeof name, "contours/utt_%05zu.csv", ui);
    {
      std::ofstream f(fs::path(out_dir) / name);
      f << "frame,f0_pred,f0_true,voiced\n";
      f.precision(17);
      for (int i = 0; i < frames; ++i)
        f << i << "," << hz[i] << "," << u.contour.values[i] << "," << int(u.contour.voiced[i])
          << "\n";
    }
    emitted.push_back(name);

    if (write_wavs) {
      F0Contour pred;
      pred.values = hz;
      pred.voiced = u.contour.voiced;
      pred.hop = u.contour.hop;
      pred.sample_rate = u.contour.sample_rate;
      const InterpolationResult interp = interpolate_unvoiced(pred);
      const SampleTrack track = expand_to_samples(interp.contour);
      const ExcitationSignal sig = synthesize(track, corpus.config.harmonic_cap);
      char wav_name[48];
      std::snprintf(wav_name, sizeof wav_name, "contours/utt_%05zu.wav", ui);
      write_wav(sig, (fs::path(out_dir) / wav_name).string());
      emitted.push_back(wav_name);
    }
    res.contours_hz.push_back(std::move(hz));
  }
  res.rmse_hz = rmse_sum / utts.size();
  res.baseline_rmse_hz = base_rmse_sum / utts.size();

  {
    std::ofstream f(fs::path(out_dir) / "summary.csv");
    f << "metric,value\n";
    f.precision(17);
    f << "voiced_rmse_hz," << res.rmse_hz << "\n";
    f << "baseline_rmse_hz," << res.baseline_rmse_hz << "\n";
  }
  emitted.push_back("summary.csv");
  write_run_manifest(out_dir, emitted);
  return res;
}

double contour_set_rmse(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b,
                        const std::vector<SyntheticUtterance>& utts) {
  if (a.size() != b.size() || a.size() != utts.size())
    throw std::invalid_argument("contour_set_rmse: size mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    sum += voiced_rmse(a[i], b[i], utts[i].contour.voiced);
  return sum / a.size();
}

namespace {

struct ProbeUtterance {
  ConditionBundle bundle;
  ExcitationSignal excitation;
  std::vector<double> z_noisy;   // observed, normalized (flat-path input)
  std::vector<double> z_clean;   // target
  std::vector<uint8_t> voiced;
};

ProbeUtterance prepare_probe(const Corpus& corpus, const SyntheticUtterance& u) {
  ProbeUtterance p;
  p.bundle = make_bundle(corpus, u);
  const InterpolationResult interp = interpolate_unvoiced(u.contour);
  const SampleTrack track = expand_to_samples(interp.contour);
  p.excitation = synthesize(track, corpus.config.harmonic_cap);
  p.z_noisy = normalized_target(u.contour, corpus.stats);
  F0Contour clean;
  clean.values = u.clean_f0;
  clean.voiced = u.contour.voiced;
  clean.hop = u.contour.hop;
  clean.sample_rate = u.contour.sample_rate;
  p.z_clean = normalized_target(clean, corpus.stats);
  p.voiced = u.contour.voiced;
  return p;
}

std::vector<double> probe_predict(AdaptorModel& adaptor, Linear& probe, const ProbeUtterance& p,
                                  bool flat) {
  const AdaptorOutput out =
      flat ? adaptor.adapt_flat(p.bundle, p.z_noisy) : adaptor.adapt(p.bundle, p.excitation);
  const Tensor2D y = probe.forward(out.fused);
  std::vector<double> pred(y.rows);
  for (int r = 0; r < y.rows; ++r) pred[r] = y(r, 0);
  return pred;
}

double probe_mse(const std::vector<double>& pred, const ProbeUtterance& p) {
  double acc = 0.0;
  long n = 0;
  for (size_t i = 0; i < pred.size(); ++i)
    if (p.voiced[i]) {
      const double d = pred[i] - p.z_clean[i];
      acc += d * d;
      ++n;
    }
  return n ? acc / n : 0.0;
}

}  // namespace

ProbeResult train_adaptor_probe(const RunConfig& cfg, const Corpus& corpus, uint64_t seed,
                                const std::string& out_dir, bool flat) {
  fs::create_directories(out_dir);
  std::mt19937_64 rng(seed);
  ParamSet ps;
  AdaptorConfig acfg;
  acfg.d_content = cfg.d_content;
  acfg.d_speaker = cfg.d_speaker;
  acfg.d_attn = cfg.d_attn;
  acfg.pyramid_channels = cfg.pyramid_channels;
  acfg.coarse_to_fine = cfg.coarse_to_fine;
  AdaptorModel adaptor(acfg, ps, rng);
  Linear probe("probe", cfg.d_content, 1, ps, rng);

  std::vector<ProbeUtterance> train, test;
  for (const auto& u : corpus.train) train.push_back(prepare_probe(corpus, u));
  for (const auto& u : corpus.test) test.push_back(prepare_probe(corpus, u));
  if (train.empty() || test.empty())
    throw std::runtime_error("train_adaptor_probe: empty split");

  AdamW opt({cfg.adaptor_lr, cfg.adam_beta1, cfg.adam_beta2, cfg.weight_decay});
  const int batch = 8;

  const std::string metrics_path = (fs::path(out_dir) / "metrics.csv").string();
  std::ofstream metrics_csv(metrics_path);
  metrics_csv << "epoch,train_mse,test_mse,test_jitter\n";
  metrics_csv.precision(17);

  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  ProbeResult res;
  for (int epoch = 1; epoch <= cfg.probe_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_loss = 0.0;
    long train_batches = 0;
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t end = std::min(order.size(), start + batch);
      ps.zero_grad();
      double batch_loss = 0.0;
      for (size_t i = start; i < end; ++i) {
        const ProbeUtterance& p = train[order[i]];
        const std::vector<double> pred = probe_predict(adaptor, probe, p, flat);
        long voiced_n = 0;
        for (uint8_t v : p.voiced) voiced_n += v;
        Tensor2D dpred(static_cast<int>(pred.size()), 1);
        double loss = 0.0;
        for (size_t k = 0; k < pred.size(); ++k) {
          if (!p.voiced[k]) continue;
          const double d = pred[k] - p.z_clean[k];
          loss += d * d;
          dpred(static_cast<int>(k), 0) =
              2.0 * d / (static_cast<double>(voiced_n) * (end - start));
        }
        batch_loss += voiced_n ? loss / voiced_n : 0.0;
        const Tensor2D d_fused = probe.backward(dpred);
        adaptor.backward(d_fused);
      }
      opt.step(ps);
      train_loss += batch_loss / (end - start);
      ++train_batches;
    }
    train_loss /= train_batches;

    double test_loss = 0.0, test_jit = 0.0;
    for (const auto& p : test) {
      const std::vector<double> pred = probe_predict(adaptor, probe, p, flat);
      test_loss += probe_mse(pred, p);
      test_jit += jitter_metric_voiced(pred, p.voiced);
    }
    test_loss /= test.size();
    test_jit /= test.size();
    metrics_csv << epoch << "," << train_loss << "," << test_loss << "," << test_jit << "\n";
    res.train_mse = train_loss;
    res.test_mse = test_loss;
    res.test_jitter = test_jit;
  }

  Manifest m;
  m["path"] = flat ? "flat" : "hierarchical";
  m["d_content"] = std::to_string(cfg.d_content);
  m["d_speaker"] = std::to_string(cfg.d_speaker);
  m["d_attn"] = std::to_string(cfg.d_attn);
  m["pyramid_channels"] = std::to_string(cfg.pyramid_channels);
  {
    std::ostringstream os;
    os.precision(17);
    os << res.test_mse;
    m["test_mse"] = os.str();
  }
  res.checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();
  save_checkpoint(res.checkpoint_path, ps, m);
  return res;
}

std::vector<AblationRow> run_ablation(const RunConfig& cfg, uint64_t seed,
                                      const std::string& out_dir) {
  fs::create_directories(out_dir);
  RunConfig ab = cfg;
  ab.utterances = cfg.ablate_utterances;
  ab.test_utterances = cfg.ablate_test_utterances;
  ab.train_steps = cfg.ablate_steps;
  ab.probe_epochs = cfg.ablate_probe_epochs;
  ab.validate();
  const Corpus corpus = generate_corpus(ab, seed);

  auto pitch_arm = [&](const std::string& name, PitchHead head) {
    const std::string dir = (fs::path(out_dir) / name).string();
    const std::string ckpt = (fs::path(dir) / "checkpoint.bin").string();
    if (!fs::exists(ckpt)) train_pitch_predictor(ab, corpus, seed, dir, head);
    LoadedPredictor lp = load_predictor(ckpt);
    SampleResult s1 = sample_contours(corpus, lp, corpus.test, seed + 101,
                                      (fs::path(dir) / "samples_a").string());
    SampleResult s2 = sample_contours(corpus, lp, corpus.test, seed + 202,
                                      (fs::path(dir) / "samples_b").string());
    AblationRow row;
    row.arm = name;
    row.rmse_hz = s1.rmse_hz;
    row.diversity_hz = contour_set_rmse(s1.contours_hz, s2.contours_hz, corpus.test);
    double jit = 0.0;
    for (size_t i = 0; i < s1.contours_hz.size(); ++i)
      jit += jitter_metric_voiced(s1.contours_hz[i], corpus.test[i].contour.voiced);
    row.pitch_jitter = jit / s1.contours_hz.size();
    return row;
  };

  auto probe_arm = [&](const std::string& name, bool flat) {
    const std::string dir = (fs::path(out_dir) / name).string();
    const std::string ckpt = (fs::path(dir) / "checkpoint.bin").string();
    if (fs::exists(ckpt)) {
      // Resume: reuse the recorded held-out metric.
      const Manifest m = read_manifest(ckpt);
      ProbeResult r;
      r.test_mse = std::stod(m.at("test_mse"));
      r.checkpoint_path = ckpt;
      // jitter is cheap to recompute but requires the model; re-train only
      // when the checkpoint is missing, so keep the stored value authoritative.
      std::ifstream mf(fs::path(dir) / "metrics.csv");
      std::string line, last;
      std::getline(mf, line);  // header
      while (std::getline(mf, line))
        if (!line.empty()) last = line;
      if (!last.empty()) {
        const auto p1 = last.rfind(',');
        r.test_jitter = std::stod(last.substr(p1 + 1));
      }
      return r;
    }
    return train_adaptor_probe(ab, corpus, seed, dir, flat);
  };

  const AblationRow full_pitch = pitch_arm("arm_full", PitchHead::diffusion);
  const ProbeResult full_probe = probe_arm("arm_full_probe", /*flat=*/false);
  const AblationRow reg_pitch = pitch_arm("arm_mse_regressor", PitchHead::regressor);
  const ProbeResult flat_probe = probe_arm("arm_flat_probe", /*flat=*/true);

  std::vector<AblationRow> rows(3);
  rows[0] = full_pitch;
  rows[0].arm = "full";
  rows[0].probe_mse = full_probe.test_mse;
  rows[0].probe_jitter = full_probe.test_jitter;
  rows[1] = reg_pitch;
  rows[1].arm = "mse_regressor";
  rows[1].probe_mse = full_probe.test_mse;
  rows[1].probe_jitter = full_probe.test_jitter;
  rows[2] = full_pitch;
  rows[2].arm = "flat_adaptor";
  rows[2].probe_mse = flat_probe.test_mse;
  rows[2].probe_jitter = flat_probe.test_jitter;

  write_ablation_report(rows, (fs::path(out_dir) / "report.csv").string());
  return rows;
}

void write_ablation_report(const std::vector<AblationRow>& rows, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "arm,voiced_rmse_hz,inter_seed_diversity_hz,pitch_jitter,probe_mse,probe_jitter\n";
  f.precision(17);
  for (const auto& r : rows)
    f << r.arm << "," << r.rmse_hz << "," << r.diversity_hz << "," << r.pitch_jitter << ","
      << r.probe_mse << "," << r.probe_jitter << "\n";
}

}  // namespace prosody
