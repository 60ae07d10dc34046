// SPDX-License-Identifier: Apache-2.0
#include "prosody/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace prosody {

double jitter_metric(const std::vector<double>& x) {
  if (x.size() < 3) throw std::invalid_argument("jitter_metric: length must be >= 3");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size();
  if (var < 1e-12) return 0.0;
  double acc = 0.0;
  for (size_t i = 1; i + 1 < x.size(); ++i) {
    const double d2 = x[i + 1] - 2.0 * x[i] + x[i - 1];
    acc += d2 * d2;
  }
  return acc / (x.size() - 2) / var;
}

double jitter_metric_voiced(const std::vector<double>& values, const std::vector<uint8_t>& voiced) {
  std::vector<double> traj;
  for (size_t i = 0; i < values.size(); ++i)
    if (voiced.empty() || voiced[i]) traj.push_back(values[i]);
  if (traj.size() < 3) return 0.0;
  return jitter_metric(traj);
}

double voiced_rmse(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<uint8_t>& voiced) {
  if (a.size() != b.size()) throw std::invalid_argument("voiced_rmse: length mismatch");
  double acc = 0.0;
  long n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!voiced.empty() && !voiced[i]) continue;
    const double d = a[i] - b[i];
    acc += d * d;
    ++n;
  }
  if (n == 0) return 0.0;
  return std::sqrt(acc / n);
}

uint64_t fnv1a_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("fnv1a: cannot open " + path);
  uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!f) break;
  }
  return h;
}

void write_run_manifest(const std::string& out_dir, const std::vector<std::string>& files) {
  std::ofstream m(std::filesystem::path(out_dir) / "manifest.txt");
  if (!m) throw std::runtime_error("manifest: cannot open in " + out_dir);
  for (const auto& rel : files) {
    const uint64_t h = fnv1a_file((std::filesystem::path(out_dir) / rel).string());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    m << hex << "  " << rel << "\n";
  }
}

}  // namespace prosody
