// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "prosody/adaptor.hpp"
#include "prosody/corpus.hpp"
#include "prosody/denoiser.hpp"
#include "prosody/diffusion.hpp"

namespace prosody {

// Normalized diffusion target for one utterance: unvoiced gaps interpolated,
// then corpus-normalized in the configured domain.
std::vector<double> normalized_target(const F0Contour& contour, const NormStats& stats);

Conditioning make_conditioning(const Corpus& corpus, const SyntheticUtterance& u);

NoiseSchedule schedule_from_config(const RunConfig& cfg);

// Pitch predictor head: the diffusion denoiser, or the same network run as
// a direct MSE regressor (the FastSpeech-style ablation arm).
enum class PitchHead { diffusion, regressor };

struct TrainPitchResult {
  double early_avg = 0.0;  // mean train loss over the first 100 steps
  double final_avg = 0.0;  // mean train loss over the last 100 steps
  double best_val = 0.0;
  std::string checkpoint_path;
};

TrainPitchResult train_pitch_predictor(const RunConfig& cfg, const Corpus& corpus, uint64_t seed,
                                       const std::string& out_dir,
                                       PitchHead head = PitchHead::diffusion);

// Rebuilds the model a checkpoint was trained with.
struct LoadedPredictor {
  std::unique_ptr<Denoiser> model;
  NoiseSchedule schedule;
  NormStats stats;
  PitchHead head = PitchHead::diffusion;
};
LoadedPredictor load_predictor(const std::string& checkpoint_path);

// Deterministic validation loss (fixed eval noise stream).
double eval_pitch_loss(const RunConfig& cfg, const Corpus& corpus,
                       const std::vector<SyntheticUtterance>& split, Denoiser& model,
                       const NoiseSchedule& sched, PitchHead head, uint64_t eval_seed);

struct SampleResult {
  double rmse_hz = 0.0;           // voiced RMSE vs ground truth
  double baseline_rmse_hz = 0.0;  // corpus-mean-contour baseline
  std::vector<std::vector<double>> contours_hz;  // per utterance, 0 on unvoiced
};

SampleResult sample_contours(const Corpus& corpus, LoadedPredictor& predictor,
                             const std::vector<SyntheticUtterance>& utts, uint64_t seed,
                             const std::string& out_dir, bool write_wavs = false);

// Mean voiced RMSE between two per-utterance contour sets (sampling
// diversity when the sets come from different seeds).
double contour_set_rmse(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b,
                        const std::vector<SyntheticUtterance>& utts);

struct ProbeResult {
  double test_mse = 0.0;     // held-out speakers, voiced frames, normalized
  double test_jitter = 0.0;  // jitter of the probe-predicted trajectories
  double train_mse = 0.0;
  std::string checkpoint_path;
};

// Trains the adaptor (hierarchical or flat) end-to-end against a linear
// frame-level pitch-reconstruction probe; the probe target is the
// noise-free underlying contour.
ProbeResult train_adaptor_probe(const RunConfig& cfg, const Corpus& corpus, uint64_t seed,
                                const std::string& out_dir, bool flat);

struct AblationRow {
  std::string arm;
  double rmse_hz = 0.0;
  double diversity_hz = 0.0;
  double pitch_jitter = 0.0;
  double probe_mse = 0.0;
  double probe_jitter = 0.0;
};

// Three paired arms: full model, MSE-regressor pitch head, flat adaptor.
// Re-runs resume from per-arm checkpoints already in out_dir.
std::vector<AblationRow> run_ablation(const RunConfig& cfg, uint64_t seed,
                                      const std::string& out_dir);

void write_ablation_report(const std::vector<AblationRow>& rows, const std::string& path);

}  // namespace prosody
