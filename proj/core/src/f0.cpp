// SPDX-License-Identifier: Apache-2.0
#include "prosody/f0.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prosody {

void validate_contour(const F0Contour& c, bool raw_form) {
  if (c.values.size() != c.voiced.size())
    throw std::invalid_argument("contour: values/voiced length mismatch");
  if (c.hop <= 0) throw std::invalid_argument("contour: hop must be positive");
  if (c.sample_rate <= 0) throw std::invalid_argument("contour: sample_rate must be positive");
  const double nyquist = 0.5 * c.sample_rate;
  for (size_t i = 0; i < c.values.size(); ++i) {
    const double x = c.values[i];
    if (!std::isfinite(x) || x < 0.0)
      throw std::invalid_argument("contour: non-finite or negative value");
    if (c.voiced[i]) {
      if (x < kMinVoicedHz || x > nyquist)
        throw std::invalid_argument("contour: voiced value outside [20, sr/2]");
    } else if (raw_form && x != 0.0) {
      throw std::invalid_argument("contour: raw unvoiced frame must be 0");
    }
  }
}

InterpolationResult interpolate_unvoiced(const F0Contour& c) {
  InterpolationResult out;
  out.contour = c;
  const int n = c.frames();
  std::vector<int> voiced_idx;
  for (int i = 0; i < n; ++i)
    if (c.voiced[i]) voiced_idx.push_back(i);

  if (voiced_idx.empty()) {
    std::fill(out.contour.values.begin(), out.contour.values.end(), 0.0);
    out.all_unvoiced = true;
    return out;
  }

  auto& v = out.contour.values;
  // Edge runs: nearest voiced value.
  for (int i = 0; i < voiced_idx.front(); ++i) v[i] = v[voiced_idx.front()];
  for (int i = voiced_idx.back() + 1; i < n; ++i) v[i] = v[voiced_idx.back()];
  // Interior gaps: linear between the bracketing voiced frames.
  for (size_t k = 0; k + 1 < voiced_idx.size(); ++k) {
    const int a = voiced_idx[k];
    const int b = voiced_idx[k + 1];
    for (int i = a + 1; i < b; ++i) {
      const double t = static_cast<double>(i - a) / (b - a);
      v[i] = v[a] + t * (v[b] - v[a]);
    }
  }
  return out;
}

SampleTrack expand_to_samples(const F0Contour& c) {
  validate_contour(c, /*raw_form=*/false);
  SampleTrack out;
  out.sample_rate = c.sample_rate;
  const int n = c.frames();
  const int hop = c.hop;
  out.f0.resize(static_cast<size_t>(n) * hop);
  out.gate.resize(out.f0.size());
  const double half = 0.5 * hop;
  for (int s = 0; s < n * hop; ++s) {
    const int frame = s / hop;  // frame whose center is nearest
    out.gate[s] = c.voiced[frame];
    const double pos = (s - half) / hop;  // fractional frame-center index
    if (pos <= 0.0 || n == 1) {
      out.f0[s] = c.values.front();
    } else if (pos >= n - 1) {
      out.f0[s] = c.values.back();
    } else {
      const int i = static_cast<int>(pos);
      const double t = pos - i;
      out.f0[s] = c.values[i] + t * (c.values[i + 1] - c.values[i]);
    }
  }
  return out;
}

static double to_domain(double hz, PitchDomain d) {
  if (d == PitchDomain::log_hz) {
    if (hz <= 0.0) throw std::invalid_argument("normalize: log domain requires positive Hz");
    return std::log(hz);
  }
  return hz;
}

NormalizedContour normalize(const F0Contour& c, const NormStats& stats) {
  if (!std::isfinite(stats.mean) || !std::isfinite(stats.std))
    throw std::invalid_argument("normalize: non-finite stats");
  if (stats.std <= 0.0) throw std::invalid_argument("normalize: std must be positive");
  NormalizedContour nc;
  nc.mean = stats.mean;
  nc.std = stats.std;
  nc.domain = stats.domain;
  nc.hop = c.hop;
  nc.sample_rate = c.sample_rate;
  nc.z_values.reserve(c.values.size());
  for (double x : c.values) nc.z_values.push_back((to_domain(x, stats.domain) - stats.mean) / stats.std);
  return nc;
}

DenormalizeResult denormalize(const NormalizedContour& nc) {
  DenormalizeResult out;
  const double nyquist = 0.5 * nc.sample_rate;
  out.values_hz.reserve(nc.z_values.size());
  for (double z : nc.z_values) {
    double x = nc.mean + z * nc.std;
    if (nc.domain == PitchDomain::log_hz) x = std::exp(x);
    if (x < 0.0) {
      x = 0.0;
      out.clamped = true;
    } else if (x > nyquist) {
      x = nyquist;
      out.clamped = true;
    }
    out.values_hz.push_back(x);
  }
  return out;
}

void write_contour(const F0Contour& c, std::ostream& os) {
  os << "# hop=" << c.hop << " sample_rate=" << c.sample_rate << "\n";
  for (int i = 0; i < c.frames(); ++i) {
    const double x = c.voiced[i] ? c.values[i] : 0.0;
    std::ostringstream row;
    row.precision(17);
    row << i << " " << x << "\n";
    os << row.str();
  }
}

F0Contour read_contour(std::istream& is) {
  F0Contour c;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("contour: empty stream");
  if (std::sscanf(line.c_str(), "# hop=%d sample_rate=%d", &c.hop, &c.sample_rate) != 2)
    throw std::runtime_error("contour: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long idx;
    double hz;
    if (!(row >> idx >> hz)) throw std::runtime_error("contour: bad row");
    c.values.push_back(hz);
    c.voiced.push_back(hz > 0.0 ? 1 : 0);
  }
  validate_contour(c, /*raw_form=*/true);
  return c;
}

void save_contour(const F0Contour& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_contour(c, f);
}

F0Contour load_contour(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_contour(f);
}

}  // namespace prosody
