// SPDX-License-Identifier: Apache-2.0
#include "prosody/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace prosody {

double tone_offset(TonePattern p, double u) {
  switch (p) {
    case TonePattern::level: return 0.30;
    case TonePattern::rise: return -0.20 + 0.60 * u;
    case TonePattern::fall: return 0.40 - 0.60 * u;
    case TonePattern::dip: return 0.35 - 0.55 * std::sin(M_PI * u);
    case TonePattern::neutral: return 0.0;
  }
  throw std::invalid_argument("tone_offset: bad pattern");
}

Tensor2D Corpus::regulated_content(const SyntheticUtterance& u) const {
  long frames = 0;
  for (int d : u.durations) frames += d;
  Tensor2D out(static_cast<int>(frames), token_table.cols);
  int row = 0;
  for (size_t i = 0; i < u.tokens.size(); ++i)
    for (int r = 0; r < u.durations[i]; ++r, ++row)
      for (int c = 0; c < token_table.cols; ++c) out(row, c) = token_table(u.tokens[i], c);
  return out;
}

namespace {

SyntheticSpeaker make_speaker(int id, const RunConfig& cfg, const Tensor2D& embed_proj,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  SyntheticSpeaker s;
  s.id = id;
  s.base_pitch = cfg.base_pitch_min + uni(rng) * (cfg.base_pitch_max - cfg.base_pitch_min);
  s.pitch_range = 20.0 + uni(rng) * 40.0;
  s.declination_slope = -(0.02 + uni(rng) * 0.13);
  s.vibrato_rate = 0.02 + uni(rng) * 0.04;
  s.vibrato_depth = 2.0 + uni(rng) * 6.0;

  // Stand-in for a reference-based speaker encoder: a fixed random
  // projection of the (normalized) prosody parameters plus a small
  // per-speaker random component, so unseen speakers still condition
  // meaningfully.
  std::vector<double> feat = {
      (std::log(s.base_pitch) - std::log(200.0)) / 0.3,
      (s.pitch_range - 40.0) / 20.0,
      s.declination_slope / 0.1,
      (s.vibrato_rate - 0.04) / 0.02,
      (s.vibrato_depth - 5.0) / 3.0,
  };
  s.embedding.assign(cfg.d_speaker, 0.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 0; c < cfg.d_speaker; ++c) {
    double acc = 0.0;
    for (size_t k = 0; k < feat.size(); ++k) acc += embed_proj(static_cast<int>(k), c) * feat[k];
    s.embedding[c] = acc + 0.1 * gauss(rng);
  }
  return s;
}

SyntheticUtterance make_utterance(int speaker_idx, const Corpus& corpus, std::mt19937_64& rng) {
  const RunConfig& cfg = corpus.config;
  const SyntheticSpeaker& spk = corpus.speakers[speaker_idx];
  std::uniform_int_distribution<int> n_tok(cfg.min_tokens, cfg.max_tokens);
  std::uniform_int_distribution<int> dur(cfg.min_duration, cfg.max_duration);
  std::uniform_int_distribution<int> tok(0, cfg.vocab - 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticUtterance u;
  u.speaker = spk.id;
  const int tokens = n_tok(rng);
  long frames = 0;
  for (int i = 0; i < tokens; ++i) {
    u.tokens.push_back(tok(rng));
    u.durations.push_back(dur(rng));
    frames += u.durations.back();
  }
  const int n = static_cast<int>(frames);
  const double vib_phase = 2.0 * M_PI * uni(rng);

  u.clean_f0.resize(n);
  u.contour.values.resize(n);
  u.contour.voiced.assign(n, 1);
  u.contour.hop = cfg.hop;
  u.contour.sample_rate = cfg.sample_rate;

  const double nyquist = 0.5 * cfg.sample_rate;
  const double lo = kMinVoicedHz + 10.0;
  const double hi = std::min(500.0, nyquist - 1.0);
  int frame = 0;
  for (int i = 0; i < tokens; ++i) {
    const auto pattern = static_cast<TonePattern>(u.tokens[i] % 5);
    for (int r = 0; r < u.durations[i]; ++r, ++frame) {
      const double frac = u.durations[i] == 1 ? 0.5 : static_cast<double>(r) / (u.durations[i] - 1);
      double f = spk.base_pitch + spk.declination_slope * frame +
                 spk.pitch_range * tone_offset(pattern, frac) +
                 spk.vibrato_depth * std::sin(2.0 * M_PI * spk.vibrato_rate * frame + vib_phase);
      f = std::clamp(f, lo, hi);
      u.clean_f0[frame] = f;
      u.contour.values[frame] = std::clamp(f * std::exp(cfg.noise_log_std * gauss(rng)), lo, hi);
    }
  }

  // Contiguous unvoiced runs of 2-4 frames until ~unvoiced_frac of frames.
  const int target = static_cast<int>(std::lround(cfg.unvoiced_frac * n));
  std::uniform_int_distribution<int> run_len(2, 4);
  std::uniform_int_distribution<int> pos(0, std::max(0, n - 5));
  int unvoiced = 0;
  for (int attempt = 0; attempt < 8 * tokens && unvoiced < target; ++attempt) {
    const int start = pos(rng);
    const int len = std::min(run_len(rng), n - start);
    bool clash = false;
    for (int i = start; i < start + len; ++i)
      if (!u.contour.voiced[i]) clash = true;
    if (clash) continue;
    for (int i = start; i < start + len; ++i) {
      u.contour.voiced[i] = 0;
      u.contour.values[i] = 0.0;
      u.clean_f0[i] = 0.0;
      ++unvoiced;
    }
  }
  if (unvoiced >= n) {  // keep at least one voiced frame
    u.contour.voiced[0] = 1;
    u.contour.values[0] = spk.base_pitch;
    u.clean_f0[0] = spk.base_pitch;
  }
  validate_contour(u.contour, /*raw_form=*/true);
  return u;
}

}  // namespace

Corpus generate_corpus(const RunConfig& config, uint64_t seed) {
  config.validate();
  Corpus corpus;
  corpus.config = config;
  corpus.seed = seed;
  std::mt19937_64 rng(seed);

  corpus.token_table = Tensor2D(config.vocab, config.d_content);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& x : corpus.token_table.v) x = gauss(rng) / std::sqrt(config.d_content);

  Tensor2D embed_proj(5, config.d_speaker);
  for (double& x : embed_proj.v) x = gauss(rng) / std::sqrt(5.0);

  for (int id = 0; id < config.speakers; ++id)
    corpus.speakers.push_back(make_speaker(id, config, embed_proj, rng));

  const int train_speakers = config.speakers - config.held_out_speakers;
  std::uniform_int_distribution<int> train_spk(0, train_speakers - 1);
  std::uniform_int_distribution<int> test_spk(train_speakers, config.speakers - 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  for (int i = 0; i < config.utterances; ++i) {
    SyntheticUtterance u = make_utterance(train_spk(rng), corpus, rng);
    if (uni(rng) < config.val_frac)
      corpus.val.push_back(std::move(u));
    else
      corpus.train.push_back(std::move(u));
  }
  for (int i = 0; i < config.test_utterances; ++i)
    corpus.test.push_back(make_utterance(test_spk(rng), corpus, rng));

  // Domain stats over train voiced frames.
  double sum = 0.0, sq = 0.0;
  long count = 0;
  const bool log_domain = config.domain() == PitchDomain::log_hz;
  for (const auto& u : corpus.train)
    for (int i = 0; i < u.contour.frames(); ++i)
      if (u.contour.voiced[i]) {
        const double x = log_domain ? std::log(u.contour.values[i]) : u.contour.values[i];
        sum += x;
        sq += x * x;
        ++count;
      }
  if (count < 2) throw std::runtime_error("generate_corpus: no voiced frames");
  corpus.stats.mean = sum / count;
  corpus.stats.std = std::sqrt(std::max(1e-12, sq / count - corpus.stats.mean * corpus.stats.mean));
  corpus.stats.domain = config.domain();
  return corpus;
}

namespace {

void write_utterance(std::ostream& os, const SyntheticUtterance& u) {
  os << "speaker " << u.speaker << "\n";
  os << "tokens";
  for (int t : u.tokens) os << " " << t;
  os << "\ndurations";
  for (int d : u.durations) os << " " << d;
  os << "\nframes " << u.contour.frames() << "\n";
  os.precision(17);
  for (int i = 0; i < u.contour.frames(); ++i)
    os << u.contour.values[i] << " " << u.clean_f0[i] << " " << int(u.contour.voiced[i]) << "\n";
}

SyntheticUtterance read_utterance(std::istream& is, const RunConfig& cfg) {
  SyntheticUtterance u;
  std::string line, word;
  if (!std::getline(is, line)) throw std::runtime_error("corpus: truncated utterance");
  if (std::sscanf(line.c_str(), "speaker %d", &u.speaker) != 1)
    throw std::runtime_error("corpus: bad speaker line");
  std::getline(is, line);
  {
    std::istringstream row(line);
    row >> word;
    int t;
    while (row >> t) u.tokens.push_back(t);
  }
  std::getline(is, line);
  {
    std::istringstream row(line);
    row >> word;
    int d;
    while (row >> d) u.durations.push_back(d);
  }
  std::getline(is, line);
  int frames = 0;
  if (std::sscanf(line.c_str(), "frames %d", &frames) != 1)
    throw std::runtime_error("corpus: bad frames line");
  u.contour.hop = cfg.hop;
  u.contour.sample_rate = cfg.sample_rate;
  for (int i = 0; i < frames; ++i) {
    std::getline(is, line);
    std::istringstream row(line);
    double f, clean;
    int voiced;
    if (!(row >> f >> clean >> voiced)) throw std::runtime_error("corpus: bad frame row");
    u.contour.values.push_back(f);
    u.clean_f0.push_back(clean);
    u.contour.voiced.push_back(voiced ? 1 : 0);
  }
  return u;
}

void write_split(const std::vector<SyntheticUtterance>& split, const std::string& dir) {
  fs::create_directories(dir);
  for (size_t i = 0; i < split.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "utt_%05zu.txt", i);
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("corpus: cannot write " + dir);
    write_utterance(f, split[i]);
  }
}

std::vector<SyntheticUtterance> read_split(const std::string& dir, const RunConfig& cfg, int count) {
  std::vector<SyntheticUtterance> out;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "utt_%05d.txt", i);
    std::ifstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("corpus: missing utterance file in " + dir);
    out.push_back(read_utterance(f, cfg));
  }
  return out;
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream f(fs::path(dir) / "meta.txt");
    f.precision(17);
    f << "seed " << corpus.seed << "\n";
    f << "train " << corpus.train.size() << "\n";
    f << "val " << corpus.val.size() << "\n";
    f << "test " << corpus.test.size() << "\n";
    f << "mean " << corpus.stats.mean << "\n";
    f << "std " << corpus.stats.std << "\n";
    f << "domain " << (corpus.stats.domain == PitchDomain::log_hz ? "log_hz" : "linear_hz") << "\n";
  }
  {
    std::ofstream f(fs::path(dir) / "config.txt");
    const RunConfig& c = corpus.config;
    f.precision(17);
    f << "speakers = " << c.speakers << "\nheld_out_speakers = " << c.held_out_speakers
      << "\nutterances = " << c.utterances << "\ntest_utterances = " << c.test_utterances
      << "\nvocab = " << c.vocab << "\nmin_tokens = " << c.min_tokens
      << "\nmax_tokens = " << c.max_tokens << "\nmin_duration = " << c.min_duration
      << "\nmax_duration = " << c.max_duration << "\nunvoiced_frac = " << c.unvoiced_frac
      << "\nnoise_log_std = " << c.noise_log_std << "\nbase_pitch_min = " << c.base_pitch_min
      << "\nbase_pitch_max = " << c.base_pitch_max << "\nval_frac = " << c.val_frac
      << "\nhop = " << c.hop << "\nsample_rate = " << c.sample_rate
      << "\nd_content = " << c.d_content << "\nd_speaker = " << c.d_speaker
      << "\npitch_domain = " << c.pitch_domain << "\n";
  }
  {
    std::ofstream f(fs::path(dir) / "speakers.txt");
    f.precision(17);
    for (const auto& s : corpus.speakers) {
      f << s.id << " " << s.base_pitch << " " << s.pitch_range << " " << s.declination_slope
        << " " << s.vibrato_rate << " " << s.vibrato_depth;
      for (double e : s.embedding) f << " " << e;
      f << "\n";
    }
  }
  {
    std::ofstream f(fs::path(dir) / "tokens.txt");
    f.precision(17);
    for (int r = 0; r < corpus.token_table.rows; ++r) {
      for (int c = 0; c < corpus.token_table.cols; ++c)
        f << (c ? " " : "") << corpus.token_table(r, c);
      f << "\n";
    }
  }
  write_split(corpus.train, (fs::path(dir) / "train").string());
  write_split(corpus.val, (fs::path(dir) / "val").string());
  write_split(corpus.test, (fs::path(dir) / "test").string());
}

Corpus load_corpus(const std::string& dir) {
  Corpus corpus;
  RunConfig defaults;
  corpus.config = defaults;
  {
    std::ifstream f(fs::path(dir) / "config.txt");
    if (!f) throw std::runtime_error("corpus: missing config.txt in " + dir);
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string key = line.substr(0, line.find(' '));
      apply_config_line(corpus.config, key, line.substr(eq + 2));
    }
  }
  size_t n_train = 0, n_val = 0, n_test = 0;
  {
    std::ifstream f(fs::path(dir) / "meta.txt");
    if (!f) throw std::runtime_error("corpus: missing meta.txt in " + dir);
    std::string key;
    while (f >> key) {
      if (key == "seed") f >> corpus.seed;
      else if (key == "train") f >> n_train;
      else if (key == "val") f >> n_val;
      else if (key == "test") f >> n_test;
      else if (key == "mean") f >> corpus.stats.mean;
      else if (key == "std") f >> corpus.stats.std;
      else if (key == "domain") {
        std::string d;
        f >> d;
        corpus.stats.domain = d == "log_hz" ? PitchDomain::log_hz : PitchDomain::linear_hz;
      }
    }
  }
  {
    std::ifstream f(fs::path(dir) / "speakers.txt");
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      SyntheticSpeaker s;
      row >> s.id >> s.base_pitch >> s.pitch_range >> s.declination_slope >> s.vibrato_rate >>
          s.vibrato_depth;
      double e;
      while (row >> e) s.embedding.push_back(e);
      corpus.speakers.push_back(std::move(s));
    }
  }
  {
    std::ifstream f(fs::path(dir) / "tokens.txt");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      rows.emplace_back();
      double x;
      while (row >> x) rows.back().push_back(x);
    }
    if (rows.empty()) throw std::runtime_error("corpus: empty tokens.txt");
    corpus.token_table = Tensor2D(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t c = 0; c < rows[r].size(); ++c)
        corpus.token_table(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  }
  corpus.train = read_split((fs::path(dir) / "train").string(), corpus.config, static_cast<int>(n_train));
  corpus.val = read_split((fs::path(dir) / "val").string(), corpus.config, static_cast<int>(n_val));
  corpus.test = read_split((fs::path(dir) / "test").string(), corpus.config, static_cast<int>(n_test));
  return corpus;
}

}  // namespace prosody
