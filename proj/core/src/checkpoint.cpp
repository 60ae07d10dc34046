// SPDX-License-Identifier: Apache-2.0
#include "prosody/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prosody {

namespace {

constexpr char kMagic[4] = {'P', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ofstream& f, uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x & 0xff), static_cast<unsigned char>((x >> 8) & 0xff),
                        static_cast<unsigned char>((x >> 16) & 0xff), static_cast<unsigned char>((x >> 24) & 0xff)};
  f.write(reinterpret_cast<char*>(b), 4);
}

uint32_t get_u32(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  if (!f) throw std::runtime_error("checkpoint: truncated file");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
}

void put_f32(std::ofstream& f, float x) {
  uint32_t u;
  std::memcpy(&u, &x, 4);
  put_u32(f, u);
}

float get_f32(std::ifstream& f) {
  const uint32_t u = get_u32(f);
  float x;
  std::memcpy(&x, &u, 4);
  return x;
}

std::string manifest_text(const Manifest& m) {
  std::ostringstream os;
  for (const auto& [k, v] : m) os << k << "=" << v << "\n";
  return os.str();
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

std::ifstream open_and_check(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (get_u32(f) != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  return f;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params, const Manifest& manifest) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  f.write(kMagic, 4);
  put_u32(f, kVersion);
  const std::string mtext = manifest_text(manifest);
  put_u32(f, static_cast<uint32_t>(mtext.size()));
  f.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  put_u32(f, static_cast<uint32_t>(params.items.size()));
  for (const Param* p : params.items) {
    put_u32(f, static_cast<uint32_t>(p->name.size()));
    f.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put_u32(f, 2);
    put_u32(f, static_cast<uint32_t>(p->value.rows));
    put_u32(f, static_cast<uint32_t>(p->value.cols));
    for (double x : p->value.v) put_f32(f, static_cast<float>(x));
  }
  if (!f) throw std::runtime_error("checkpoint: write failed for " + path);
}

Manifest load_checkpoint(const std::string& path, ParamSet& params) {
  std::ifstream f = open_and_check(path);
  std::string mtext(get_u32(f), '\0');
  f.read(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  const uint32_t n = get_u32(f);
  if (n != params.items.size()) throw std::runtime_error("checkpoint: array count mismatch");
  for (uint32_t i = 0; i < n; ++i) {
    std::string name(get_u32(f), '\0');
    f.read(name.data(), static_cast<std::streamsize>(name.size()));
    Param* p = params.items[i];
    if (name != p->name) throw std::runtime_error("checkpoint: name mismatch at " + name);
    if (get_u32(f) != 2) throw std::runtime_error("checkpoint: unexpected rank");
    const uint32_t rows = get_u32(f), cols = get_u32(f);
    if (rows != static_cast<uint32_t>(p->value.rows) || cols != static_cast<uint32_t>(p->value.cols))
      throw std::runtime_error("checkpoint: shape mismatch at " + name);
    for (double& x : p->value.v) x = static_cast<double>(get_f32(f));
  }
  return parse_manifest(mtext);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream f = open_and_check(path);
  std::string mtext(get_u32(f), '\0');
  f.read(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  return parse_manifest(mtext);
}

}  // namespace prosody
