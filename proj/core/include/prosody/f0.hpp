// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace prosody {

// Frame-level fundamental-frequency track. In raw form an unvoiced frame
// carries the value 0 and voiced[i] == false; after interpolate_unvoiced()
// every frame carries a positive value (unless the whole contour is
// unvoiced) while the voiced mask is kept as extracted.
struct F0Contour {
  std::vector<double> values;   // Hz, one per frame
  std::vector<uint8_t> voiced;  // same length as values
  int hop = 200;                // samples per frame
  int sample_rate = 16000;      // Hz

  int frames() const { return static_cast<int>(values.size()); }
};

constexpr double kMinVoicedHz = 20.0;

// Throws std::invalid_argument on any invariant violation.
// raw_form additionally requires values[i] == 0 exactly on unvoiced frames.
void validate_contour(const F0Contour& c, bool raw_form);

struct InterpolationResult {
  F0Contour contour;
  bool all_unvoiced = false;  // contour stays all-zero; excitation emits silence
};

// Fills unvoiced gaps: interior gaps linearly between nearest voiced
// neighbours, leading/trailing runs with the nearest voiced value.
// Idempotent; the voiced mask is preserved unchanged.
InterpolationResult interpolate_unvoiced(const F0Contour& c);

// Sample-level frequency track with a voiced gate expanded by the
// nearest-frame rule.
struct SampleTrack {
  std::vector<double> f0;     // Hz, length frames * hop
  std::vector<uint8_t> gate;  // 1 = voiced
  int sample_rate = 16000;
};

// Linear interpolation anchored at frame centers (i*hop + hop/2); values
// before the first and after the last center are held.
SampleTrack expand_to_samples(const F0Contour& c);

enum class PitchDomain { linear_hz, log_hz };

struct NormStats {
  double mean = 0.0;  // in the chosen domain
  double std = 1.0;
  PitchDomain domain = PitchDomain::log_hz;
};

struct NormalizedContour {
  std::vector<double> z_values;
  double mean = 0.0;
  double std = 1.0;
  PitchDomain domain = PitchDomain::log_hz;
  int hop = 200;
  int sample_rate = 16000;
};

// z = (x - mean) / std in the chosen domain. The contour must already be
// interpolated when the log domain is used (no zeros).
NormalizedContour normalize(const F0Contour& c, const NormStats& stats);

struct DenormalizeResult {
  std::vector<double> values_hz;
  bool clamped = false;  // some value hit the [0, sr/2] clamp
};

DenormalizeResult denormalize(const NormalizedContour& nc);

// Two-column text format: header "# hop=<hop> sample_rate=<sr>" followed by
// "<frame_index> <f0_hz>" rows; 0 Hz means unvoiced.
void save_contour(const F0Contour& c, const std::string& path);
F0Contour load_contour(const std::string& path);
void write_contour(const F0Contour& c, std::ostream& os);
F0Contour read_contour(std::istream& is);

}  // namespace prosody
