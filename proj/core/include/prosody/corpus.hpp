// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prosody/config.hpp"
#include "prosody/f0.hpp"
#include "prosody/tensor.hpp"

namespace prosody {

struct SyntheticSpeaker {
  int id = 0;
  double base_pitch = 200.0;       // Hz
  double pitch_range = 40.0;       // Hz
  double declination_slope = 0.0;  // Hz per frame
  double vibrato_rate = 0.0;       // cycles per frame
  double vibrato_depth = 0.0;      // Hz
  std::vector<double> embedding;   // d_s, fixed projection of the parameters
};

struct SyntheticUtterance {
  int speaker = 0;
  std::vector<int> tokens;
  std::vector<int> durations;   // frames per token
  F0Contour contour;            // observed (jittered) pitch; 0 on unvoiced frames
  std::vector<double> clean_f0; // underlying noise-free pitch, 0 on unvoiced frames
};

// Five-pattern tone inventory; pattern index = token id modulo 5.
enum class TonePattern { level = 0, rise, fall, dip, neutral };
double tone_offset(TonePattern p, double u);  // in units of pitch_range, u in [0,1]

struct Corpus {
  RunConfig config;
  uint64_t seed = 0;
  std::vector<SyntheticSpeaker> speakers;
  Tensor2D token_table;  // vocab x d_content, fixed random
  NormStats stats;       // over train voiced frames, in the configured domain
  std::vector<SyntheticUtterance> train, val, test;

  // Length-regulated content for one utterance (frames x d_content).
  Tensor2D regulated_content(const SyntheticUtterance& u) const;
};

// Deterministic given (config, seed). Test utterances come from the
// held-out speakers only; splits are disjoint by construction.
Corpus generate_corpus(const RunConfig& config, uint64_t seed);

void save_corpus(const Corpus& corpus, const std::string& dir);
Corpus load_corpus(const std::string& dir);

}  // namespace prosody
