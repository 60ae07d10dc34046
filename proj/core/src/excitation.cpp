// SPDX-License-Identifier: Apache-2.0
#include "prosody/excitation.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace prosody {

int harmonic_count(double f0_hz, double sample_rate_hz, int k_max) {
  if (sample_rate_hz <= 0.0) throw std::invalid_argument("harmonic_count: sample rate <= 0");
  if (k_max < 1) throw std::invalid_argument("harmonic_count: k_max < 1");
  if (f0_hz <= 0.0) return 0;
  const double nyq_cap = std::floor(sample_rate_hz / (2.0 * f0_hz));
  if (nyq_cap >= static_cast<double>(k_max)) return k_max;
  return static_cast<int>(nyq_cap);
}

ExcitationSignal synthesize(const SampleTrack& track, int k_max) {
  if (track.f0.size() != track.gate.size())
    throw std::invalid_argument("synthesize: f0/gate length mismatch");
  ExcitationSignal sig;
  sig.sample_rate = track.sample_rate;
  sig.k_max = k_max;
  sig.samples.resize(track.f0.size(), 0.0);

  const double fs = static_cast<double>(track.sample_rate);
  const double two_pi = 2.0 * M_PI;
  double phase = 0.0;  // running sum of f0, kept in [0, fs)
  for (size_t n = 0; n < track.f0.size(); ++n) {
    const double f0 = track.f0[n];
    if (!std::isfinite(f0) || f0 < 0.0) throw std::invalid_argument("synthesize: bad f0 value");
    phase = std::fmod(phase + f0, fs);
    if (!track.gate[n] || f0 <= 0.0) continue;  // gated sample stays 0
    const int harmonics = harmonic_count(f0, fs, k_max);
    const double base = two_pi * phase / fs;
    double acc = 0.0;
    for (int k = 1; k <= harmonics; ++k) acc += std::sin(k * base);
    sig.samples[n] = acc;
  }
  return sig;
}

namespace {

void put_u32(std::ofstream& f, uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x & 0xff), static_cast<unsigned char>((x >> 8) & 0xff),
                        static_cast<unsigned char>((x >> 16) & 0xff), static_cast<unsigned char>((x >> 24) & 0xff)};
  f.write(reinterpret_cast<char*>(b), 4);
}

void put_u16(std::ofstream& f, uint16_t x) {
  unsigned char b[2] = {static_cast<unsigned char>(x & 0xff), static_cast<unsigned char>((x >> 8) & 0xff)};
  f.write(reinterpret_cast<char*>(b), 2);
}

uint32_t get_u32(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
}

uint16_t get_u16(std::ifstream& f) {
  unsigned char b[2];
  f.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

}  // namespace

void write_wav(const ExcitationSignal& sig, const std::string& path, bool normalize_peak) {
  switch (sig.sample_rate) {
    case 8000: case 16000: case 22050: case 24000: case 44100: case 48000: break;
    default: throw std::invalid_argument("write_wav: unsupported sample rate");
  }
  double peak = 0.0;
  for (double x : sig.samples) peak = std::max(peak, std::fabs(x));
  const double scale = (normalize_peak && peak > 0.0) ? 0.9 / peak : 1.0;

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_wav: cannot open " + path);
  const uint32_t n = static_cast<uint32_t>(sig.samples.size());
  const uint32_t data_bytes = n * 2;
  f.write("RIFF", 4);
  put_u32(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  put_u32(f, 16);
  put_u16(f, 1);  // PCM
  put_u16(f, 1);  // mono
  put_u32(f, static_cast<uint32_t>(sig.sample_rate));
  put_u32(f, static_cast<uint32_t>(sig.sample_rate) * 2);
  put_u16(f, 2);
  put_u16(f, 16);
  f.write("data", 4);
  put_u32(f, data_bytes);
  for (double x : sig.samples) {
    double y = x * scale;
    y = std::max(-1.0, std::min(1.0, y));
    const long q = std::max(-32768L, std::min(32767L, std::lrint(y * 32768.0)));
    put_u16(f, static_cast<uint16_t>(q));
  }
  if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

WavData read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_wav: cannot open " + path);
  char tag[5] = {0};
  f.read(tag, 4);
  if (std::strncmp(tag, "RIFF", 4) != 0) throw std::runtime_error("read_wav: not RIFF");
  get_u32(f);
  f.read(tag, 4);
  if (std::strncmp(tag, "WAVE", 4) != 0) throw std::runtime_error("read_wav: not WAVE");

  WavData out;
  uint16_t bits = 0;
  while (f.read(tag, 4)) {
    const uint32_t chunk = get_u32(f);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      const uint16_t fmt = get_u16(f);
      const uint16_t ch = get_u16(f);
      out.sample_rate = static_cast<int>(get_u32(f));
      get_u32(f);
      get_u16(f);
      bits = get_u16(f);
      if (fmt != 1 || ch != 1 || bits != 16) throw std::runtime_error("read_wav: unsupported format");
      f.ignore(chunk > 16 ? chunk - 16 : 0);
    } else if (std::strncmp(tag, "data", 4) == 0) {
      const uint32_t n = chunk / 2;
      out.samples.resize(n);
      for (uint32_t i = 0; i < n; ++i)
        out.samples[i] = static_cast<int16_t>(get_u16(f)) / 32768.0;
      return out;
    } else {
      f.ignore(chunk + (chunk & 1));
    }
  }
  throw std::runtime_error("read_wav: no data chunk");
}

void write_excitation_csv(const ExcitationSignal& sig, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "sample_index,value\n";
  f.precision(17);
  for (size_t n = 0; n < sig.samples.size(); ++n) f << n << "," << sig.samples[n] << "\n";
}

}  // namespace prosody
