// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "prosody/f0.hpp"

namespace prosody {

// All run hyperparameters. Loaded from a "key = value" file; unknown keys
// are rejected, values are validated at load.
struct RunConfig {
  // corpus
  int speakers = 48;
  int held_out_speakers = 8;
  int utterances = 512;       // train + val
  int test_utterances = 48;   // held-out speakers
  int vocab = 40;
  int min_tokens = 5, max_tokens = 10;
  int min_duration = 4, max_duration = 10;  // frames per token
  double unvoiced_frac = 0.10;
  double noise_log_std = 0.20;  // multiplicative pitch jitter, log domain
  double base_pitch_min = 120.0, base_pitch_max = 300.0;
  double val_frac = 0.1;
  int hop = 200;
  int sample_rate = 16000;

  // model dims
  int d_content = 32;
  int d_speaker = 16;
  int hidden = 64;
  int blocks = 2;
  int step_dim = 64;
  int diffusion_steps = 100;  // T
  double beta_start = 0.0;    // 0 = canonical range rescaled by 1000/T
  double beta_end = 0.0;
  std::string pitch_domain = "log_hz";
  std::string input_grad_mode = "stop";  // stop | clip
  double input_grad_max = 1.0;

  // pitch-predictor training
  int train_steps = 5000;
  int batch = 16;
  double lr = 1e-4;
  double adam_beta1 = 0.8;
  double adam_beta2 = 0.99;
  double weight_decay = 0.01;
  double grad_clip = 0.0;  // 0 = off
  int log_every = 100;
  int eval_every = 500;

  // adaptor / probe training
  int d_attn = 16;
  int pyramid_channels = 8;
  int harmonic_cap = 200;
  int probe_epochs = 30;
  double adaptor_lr = 1e-3;
  bool coarse_to_fine = true;

  // sampling / ablation
  int sample_utterances = 32;
  int ablate_utterances = 192;
  int ablate_test_utterances = 32;
  int ablate_steps = 500;
  int ablate_probe_epochs = 25;

  PitchDomain domain() const;
  void validate() const;  // throws std::invalid_argument
};

RunConfig load_config(const std::string& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace prosody
