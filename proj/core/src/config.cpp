// SPDX-License-Identifier: Apache-2.0
#include "prosody/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prosody {

PitchDomain RunConfig::domain() const {
  if (pitch_domain == "log_hz") return PitchDomain::log_hz;
  if (pitch_domain == "linear_hz") return PitchDomain::linear_hz;
  throw std::invalid_argument("config: pitch_domain must be log_hz or linear_hz");
}

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  require(speakers >= 2, "need >= 2 speakers");
  require(held_out_speakers >= 1 && held_out_speakers < speakers, "held_out_speakers in [1, speakers)");
  require(utterances >= 64, "need >= 64 utterances");
  require(test_utterances >= 1, "test_utterances >= 1");
  require(vocab >= 5, "vocab >= 5");
  require(min_tokens >= 1 && max_tokens >= min_tokens, "token bounds");
  require(min_duration >= 1 && max_duration >= min_duration, "duration bounds");
  require(unvoiced_frac >= 0.0 && unvoiced_frac < 0.5, "unvoiced_frac in [0, 0.5)");
  require(noise_log_std >= 0.0, "noise_log_std >= 0");
  require(base_pitch_min >= 80.0 && base_pitch_max <= 400.0 && base_pitch_min < base_pitch_max,
          "base pitch range inside [80, 400]");
  require(val_frac > 0.0 && val_frac < 0.5, "val_frac in (0, 0.5)");
  require(hop > 0 && sample_rate > 0, "hop and sample_rate positive");
  require(d_content > 0 && d_speaker > 0 && hidden > 0 && blocks > 0, "model dims positive");
  require(step_dim >= 2 && step_dim % 2 == 0, "step_dim even >= 2");
  require(diffusion_steps >= 1, "diffusion_steps >= 1");
  require(pitch_domain == "log_hz" || pitch_domain == "linear_hz", "pitch_domain");
  require(input_grad_mode == "stop" || input_grad_mode == "clip", "input_grad_mode");
  require(train_steps >= 1 && batch >= 1, "training sizes");
  require(lr > 0.0 && adaptor_lr > 0.0, "learning rates positive");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam betas");
  require(weight_decay >= 0.0, "weight_decay >= 0");
  require(log_every >= 1 && eval_every >= 1, "log/eval cadence");
  require(d_attn > 0 && pyramid_channels > 0, "adaptor dims positive");
  require(harmonic_cap >= 1, "harmonic_cap >= 1");
  require(probe_epochs >= 1 && ablate_probe_epochs >= 1, "probe epochs");
  require(sample_utterances >= 1 && ablate_utterances >= 64 && ablate_steps >= 1, "ablation sizes");
}

namespace {

int to_int(const std::string& v) {
  size_t pos = 0;
  const int x = std::stoi(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: bad integer '" + v + "'");
  return x;
}

double to_double(const std::string& v) {
  size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: bad number '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad bool '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_config_line(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "speakers") c.speakers = to_int(value);
  else if (key == "held_out_speakers") c.held_out_speakers = to_int(value);
  else if (key == "utterances") c.utterances = to_int(value);
  else if (key == "test_utterances") c.test_utterances = to_int(value);
  else if (key == "vocab") c.vocab = to_int(value);
  else if (key == "min_tokens") c.min_tokens = to_int(value);
  else if (key == "max_tokens") c.max_tokens = to_int(value);
  else if (key == "min_duration") c.min_duration = to_int(value);
  else if (key == "max_duration") c.max_duration = to_int(value);
  else if (key == "unvoiced_frac") c.unvoiced_frac = to_double(value);
  else if (key == "noise_log_std") c.noise_log_std = to_double(value);
  else if (key == "base_pitch_min") c.base_pitch_min = to_double(value);
  else if (key == "base_pitch_max") c.base_pitch_max = to_double(value);
  else if (key == "val_frac") c.val_frac = to_double(value);
  else if (key == "hop") c.hop = to_int(value);
  else if (key == "sample_rate") c.sample_rate = to_int(value);
  else if (key == "d_content") c.d_content = to_int(value);
  else if (key == "d_speaker") c.d_speaker = to_int(value);
  else if (key == "hidden") c.hidden = to_int(value);
  else if (key == "blocks") c.blocks = to_int(value);
  else if (key == "step_dim") c.step_dim = to_int(value);
  else if (key == "diffusion_steps") c.diffusion_steps = to_int(value);
  else if (key == "beta_start") c.beta_start = to_double(value);
  else if (key == "beta_end") c.beta_end = to_double(value);
  else if (key == "pitch_domain") c.pitch_domain = value;
  else if (key == "input_grad_mode") c.input_grad_mode = value;
  else if (key == "input_grad_max") c.input_grad_max = to_double(value);
  else if (key == "train_steps") c.train_steps = to_int(value);
  else if (key == "batch") c.batch = to_int(value);
  else if (key == "lr") c.lr = to_double(value);
  else if (key == "adam_beta1") c.adam_beta1 = to_double(value);
  else if (key == "adam_beta2") c.adam_beta2 = to_double(value);
  else if (key == "weight_decay") c.weight_decay = to_double(value);
  else if (key == "grad_clip") c.grad_clip = to_double(value);
  else if (key == "log_every") c.log_every = to_int(value);
  else if (key == "eval_every") c.eval_every = to_int(value);
  else if (key == "d_attn") c.d_attn = to_int(value);
  else if (key == "pyramid_channels") c.pyramid_channels = to_int(value);
  else if (key == "harmonic_cap") c.harmonic_cap = to_int(value);
  else if (key == "probe_epochs") c.probe_epochs = to_int(value);
  else if (key == "adaptor_lr") c.adaptor_lr = to_double(value);
  else if (key == "coarse_to_fine") c.coarse_to_fine = to_bool(value);
  else if (key == "sample_utterances") c.sample_utterances = to_int(value);
  else if (key == "ablate_utterances") c.ablate_utterances = to_int(value);
  else if (key == "ablate_test_utterances") c.ablate_test_utterances = to_int(value);
  else if (key == "ablate_steps") c.ablate_steps = to_int(value);
  else if (key == "ablate_probe_epochs") c.ablate_probe_epochs = to_int(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key = value");
    apply_config_line(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

}  // namespace prosody
