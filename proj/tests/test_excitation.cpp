// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "prosody/excitation.hpp"

using namespace prosody;

namespace {

SampleTrack constant_track(double f0, int samples, int sr = 16000) {
  SampleTrack t;
  t.f0.assign(samples, f0);
  t.gate.assign(samples, 1);
  t.sample_rate = sr;
  return t;
}

// Goertzel-style single-bin DFT magnitude.
double bin_magnitude(const std::vector<double>& x, double freq_hz, double sr) {
  double re = 0.0, im = 0.0;
  const double w = 2.0 * M_PI * freq_hz / sr;
  for (size_t n = 0; n < x.size(); ++n) {
    re += x[n] * std::cos(w * n);
    im -= x[n] * std::sin(w * n);
  }
  return std::hypot(re, im);
}

}  // namespace

TEST_CASE("harmonic count follows the Nyquist cap") {
  CHECK(harmonic_count(100, 16000, 200) == 80);
  CHECK(harmonic_count(30, 16000, 200) == 200);
  CHECK(harmonic_count(8000, 16000, 200) == 1);
  CHECK(harmonic_count(0, 16000, 200) == 0);
  CHECK(harmonic_count(-5, 16000, 200) == 0);
  CHECK_THROWS_AS(harmonic_count(100, 16000, 0), std::invalid_argument);
}

TEST_CASE("single-sample hand evaluation") {
  // f0 = fs/4: the phase sum includes sample 0, so p[0] = sin(pi/2) + sin(pi).
  const ExcitationSignal sig = synthesize(constant_track(4000, 1));
  REQUIRE(sig.samples.size() == 1);
  CHECK(sig.samples[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all-unvoiced track synthesizes silence") {
  SampleTrack t = constant_track(200, 400);
  std::fill(t.gate.begin(), t.gate.end(), 0);
  const ExcitationSignal sig = synthesize(t);
  for (double s : sig.samples) CHECK(s == 0.0);
}

TEST_CASE("gated samples are exactly zero while phase keeps running") {
  SampleTrack gated = constant_track(200, 600);
  for (int n = 200; n < 400; ++n) gated.gate[n] = 0;
  const ExcitationSignal with_gap = synthesize(gated);
  const ExcitationSignal full = synthesize(constant_track(200, 600));
  for (int n = 200; n < 400; ++n) CHECK(with_gap.samples[n] == 0.0);
  // Phase accumulates through the gap, so the tail matches the ungated signal.
  for (int n = 400; n < 600; ++n)
    CHECK(with_gap.samples[n] == doctest::Approx(full.samples[n]).epsilon(1e-12));
}

TEST_CASE("amplitude bound and determinism") {
  std::mt19937_64 rng(5);
  SampleTrack t;
  t.sample_rate = 16000;
  std::uniform_real_distribution<double> hz(50.0, 500.0);
  for (int n = 0; n < 2000; ++n) {
    t.f0.push_back(hz(rng));
    t.gate.push_back(rng() % 4 != 0);
  }
  const ExcitationSignal a = synthesize(t);
  const ExcitationSignal b = synthesize(t);
  CHECK(a.samples == b.samples);  // bit-identical
  for (size_t n = 0; n < t.f0.size(); ++n)
    CHECK(std::fabs(a.samples[n]) <= harmonic_count(t.f0[n], 16000, kDefaultHarmonicCap) + 1e-9);
}

TEST_CASE("constant-pitch spectrum peaks at harmonics only") {
  const double f0 = 200.0, sr = 16000.0;
  const ExcitationSignal sig = synthesize(constant_track(f0, 16000));
  const double fundamental = bin_magnitude(sig.samples, f0, sr);
  REQUIRE(fundamental > 1000.0);  // ~N/2 for a unit sinusoid over 16000 samples
  // k = 40 sits exactly at Nyquist where the sampled sinusoid vanishes.
  for (int k = 1; k <= 39; ++k) {
    const double peak = bin_magnitude(sig.samples, k * f0, sr);
    CHECK(peak > 0.5 * fundamental);  // every harmonic present at full strength
  }
  // Between-harmonic and above-Nyquist-foldover probes stay below 5%.
  for (double freq : {100.0, 300.0, 431.0, 517.0, 1111.0, 3333.0, 5050.0, 7900.0}) {
    CHECK(bin_magnitude(sig.samples, freq, sr) < 0.05 * fundamental);
  }
}

TEST_CASE("wav round trip") {
  const char* path = "test_round_trip.wav";
  const ExcitationSignal sig = synthesize(constant_track(220, 16000));
  write_wav(sig, path);
  const WavData back = read_wav(path);
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == 16000);  // exactly 1.000 s

  double peak = 0.0;
  for (double x : sig.samples) peak = std::max(peak, std::fabs(x));
  const double scale = 0.9 / peak;
  for (size_t n = 0; n < back.samples.size(); ++n)
    CHECK(std::fabs(back.samples[n] - sig.samples[n] * scale) <= 1.0 / 32768.0);
  std::remove(path);
}

TEST_CASE("all-zero signal writes an all-zero payload") {
  const char* path = "test_zero.wav";
  ExcitationSignal sig;
  sig.samples.assign(1000, 0.0);
  write_wav(sig, path);
  const WavData back = read_wav(path);
  for (double x : back.samples) CHECK(x == 0.0);
  std::remove(path);
}

TEST_CASE("wav rejects odd sample rates") {
  ExcitationSignal sig;
  sig.samples.assign(10, 0.0);
  sig.sample_rate = 12345;
  CHECK_THROWS_AS(write_wav(sig, "nope.wav"), std::invalid_argument);
}
