// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <random>
#include <vector>

#include "prosody/excitation.hpp"
#include "prosody/nn.hpp"
#include "prosody/tensor.hpp"

namespace prosody {

// Downsampling chain from the sample level: cumulative factors 20, 200,
// 2000, 4000. Level 2 lands exactly on the hop-200 frame rate.
constexpr std::array<int, 4> kPyramidFactors = {20, 10, 10, 2};

// Four downsampled views of the excitation signal, fine to coarse:
// sub-frame, frame, ~phoneme, ~word.
struct ProsodyPyramid {
  std::array<Tensor2D, 4> levels;
};

// Ceil-division level lengths for a sample count n.
std::array<int, 4> pyramid_lengths(long n);

// Deterministic twin of the learned path: mean-pooling with the same
// strides, scalar channels. Used as the exact oracle in tests.
ProsodyPyramid build_pyramid_pooled(const ExcitationSignal& excitation);

// Learned path: per level a strided convolution (kernel 2*factor, stride
// factor) followed by tanh; first stage lifts the scalar signal to
// `channels`.
class PyramidEncoder {
 public:
  PyramidEncoder(int channels, ParamSet& ps, std::mt19937_64& rng);

  ProsodyPyramid forward(const ExcitationSignal& excitation);
  // d_levels[i] is the gradient reaching level i (empty tensor = none).
  void backward(const std::array<Tensor2D, 4>& d_levels);

  int channels() const { return channels_; }

 private:
  int channels_;
  std::vector<std::unique_ptr<StridedConv>> stages_;
  std::array<Tensor2D, 4> acts_;  // tanh outputs, cached for backward
};

// Content sequence, global speaker vector and per-token durations.
struct ConditionBundle {
  Tensor2D content;             // tokens x d_c
  std::vector<double> speaker;  // d_s
  std::vector<int> durations;   // frames per token, all >= 1
};

// Token i repeated durations[i] times, order preserved.
Tensor2D length_regulate(const Tensor2D& content, const std::vector<int>& durations);
// Gradient: rows belonging to token i sum back into content row i.
Tensor2D length_regulate_backward(const Tensor2D& d_out, const std::vector<int>& durations,
                                  int tokens);

// Single-head cross-attention with residual:
//   out = Q + softmax((Q Wq)(KV Wk)^T / sqrt(d_attn)) (KV Wv) Wo.
// Wo is zero-initialized so the block starts as the identity.
class CrossAttention {
 public:
  CrossAttention(const std::string& name, int d_model, int kv_dim, int d_attn, ParamSet& ps,
                 std::mt19937_64& rng);

  Tensor2D forward(const Tensor2D& queries, const Tensor2D& keys_values);
  // Returns dQ; writes the key/value gradient into d_kv.
  Tensor2D backward(const Tensor2D& dy, Tensor2D& d_kv);

  const Tensor2D& last_attention() const { return attn_; }

 private:
  int d_attn_;
  Linear wq_, wk_, wv_, wo_;
  Tensor2D q_in_, kv_in_, q_, k_, v_, attn_, ctx_;
};

// Style-adaptive layer normalization: per-step layer norm over channels,
// then scale/shift produced by affine maps of the speaker vector. At
// zero-initialized map weights (gamma bias 1, delta bias 0) this is plain
// layer norm.
class Saln {
 public:
  Saln(const std::string& name, int d_model, int d_speaker, ParamSet& ps, std::mt19937_64& rng,
       bool zero_init_maps = true);

  Tensor2D forward(const Tensor2D& h, const std::vector<double>& speaker);
  Tensor2D backward(const Tensor2D& dy);

 private:
  LayerNorm norm_;
  Linear gamma_map_, delta_map_;
  Tensor2D normed_, gamma_;
};

struct AdaptorOutput {
  Tensor2D fused;  // frames x d_c
};

struct AdaptorConfig {
  int d_content = 32;
  int d_speaker = 16;
  int d_attn = 64;
  int pyramid_channels = 64;
  bool coarse_to_fine = true;  // fusion order across levels
};

// Hierarchical prosody adaptor and its flat ablation twin. Every injection
// path (attention output projections, SALN residual gates, the flat f0
// encoder head) is zero-initialized, so at construction both paths are the
// identity on the length-regulated content.
class AdaptorModel {
 public:
  AdaptorModel(const AdaptorConfig& cfg, ParamSet& ps, std::mt19937_64& rng);

  AdaptorOutput adapt(const ConditionBundle& bundle, const ExcitationSignal& excitation);
  AdaptorOutput adapt_flat(const ConditionBundle& bundle, const std::vector<double>& frame_f0);

  // Backward for whichever of the two paths ran last. Gradients for the
  // content tokens are returned (callers with fixed embeddings may ignore).
  Tensor2D backward(const Tensor2D& d_fused);

  const AdaptorConfig& config() const { return cfg_; }

 private:
  struct Unit {
    std::unique_ptr<CrossAttention> attn;
    std::unique_ptr<Saln> saln;
    Param gate;  // per-channel residual gate, zero-initialized
    Tensor2D saln_out_;
  };

  Tensor2D apply_gated_saln(Unit& u, const Tensor2D& h, const std::vector<double>& speaker);
  Tensor2D gated_saln_backward(Unit& u, const Tensor2D& dy);

  AdaptorConfig cfg_;
  PyramidEncoder pyramid_;
  Unit input_unit_;
  std::array<Unit, 4> units_;  // index = pyramid level
  Linear flat_enc1_, flat_enc2_;

  enum class LastPath { none, hier, flat } last_path_ = LastPath::none;
  std::vector<int> last_durations_;
  int last_tokens_ = 0;
  std::vector<double> last_speaker_;
  Tensor2D flat_hidden_;  // tanh activations of the flat encoder
};

// Two dense layers predicting log-duration per token from content plus the
// broadcast speaker vector; inference rounds exp(y) and clamps to >= 1.
class DurationPredictor {
 public:
  DurationPredictor(int d_content, int d_speaker, int hidden, ParamSet& ps, std::mt19937_64& rng);

  // Raw log-durations, one per token (training target space).
  std::vector<double> forward_log(const Tensor2D& content, const std::vector<double>& speaker);
  void backward(const std::vector<double>& d_log);
  std::vector<int> predict(const Tensor2D& content, const std::vector<double>& speaker);

 private:
  Linear l1_, l2_;
  Tensor2D relu_;
};

}  // namespace prosody
