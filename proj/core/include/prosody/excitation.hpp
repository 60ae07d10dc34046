// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prosody/f0.hpp"

namespace prosody {

constexpr int kDefaultHarmonicCap = 200;

// Sample-level sinusoidal excitation waveform.
struct ExcitationSignal {
  std::vector<double> samples;
  int sample_rate = 16000;
  int k_max = kDefaultHarmonicCap;
};

// Largest harmonic index kept below Nyquist: min(k_max, floor(f_s / (2 f0))).
// Zero for f0 <= 0 (silence, not an error).
int harmonic_count(double f0_hz, double sample_rate_hz, int k_max);

// p[n] = sum_{k=1..K} sin(2 pi k Phi[n] / f_s), Phi[n] the running sum of the
// f0 track including sample n, reduced modulo f_s. K is re-evaluated per
// sample; gated samples (gate 0 or f0 == 0) are exactly 0 while the phase
// accumulator keeps running.
ExcitationSignal synthesize(const SampleTrack& track, int k_max = kDefaultHarmonicCap);

// 16-bit little-endian mono PCM, canonical RIFF/WAVE layout. With
// normalize_peak the waveform is scaled so max |sample| maps to 0.9 full
// scale; an all-zero signal is written unscaled.
void write_wav(const ExcitationSignal& sig, const std::string& path, bool normalize_peak = true);

struct WavData {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 0;
};

WavData read_wav(const std::string& path);

// "sample_index,value" rows with a header line, for plotting.
void write_excitation_csv(const ExcitationSignal& sig, const std::string& path);

}  // namespace prosody
