// SPDX-License-Identifier: Apache-2.0
#include "prosody/adaptor.hpp"

#include <cmath>
#include <stdexcept>

namespace prosody {

std::array<int, 4> pyramid_lengths(long n) {
  if (n < 1) throw std::invalid_argument("pyramid_lengths: n must be >= 1");
  std::array<int, 4> out{};
  long cur = n;
  for (size_t i = 0; i < kPyramidFactors.size(); ++i) {
    cur = (cur + kPyramidFactors[i] - 1) / kPyramidFactors[i];
    out[i] = static_cast<int>(cur);
  }
  return out;
}

ProsodyPyramid build_pyramid_pooled(const ExcitationSignal& excitation) {
  if (excitation.samples.empty()) throw std::invalid_argument("build_pyramid_pooled: empty signal");
  ProsodyPyramid p;
  std::vector<double> cur = excitation.samples;
  for (size_t level = 0; level < kPyramidFactors.size(); ++level) {
    const int factor = kPyramidFactors[level];
    const int out_len = static_cast<int>((cur.size() + factor - 1) / factor);
    std::vector<double> next(out_len);
    for (int r = 0; r < out_len; ++r) {
      double sum = 0.0;
      int count = 0;
      for (int k = 0; k < factor; ++k) {
        const size_t src = static_cast<size_t>(r) * factor + k;
        if (src >= cur.size()) break;
        sum += cur[src];
        ++count;
      }
      next[r] = sum / count;
    }
    Tensor2D t(out_len, 1);
    for (int r = 0; r < out_len; ++r) t(r, 0) = next[r];
    p.levels[level] = std::move(t);
    cur = std::move(next);
  }
  return p;
}

PyramidEncoder::PyramidEncoder(int channels, ParamSet& ps, std::mt19937_64& rng)
    : channels_(channels) {
  for (size_t i = 0; i < kPyramidFactors.size(); ++i) {
    const int c_in = i == 0 ? 1 : channels;
    stages_.push_back(std::make_unique<StridedConv>(
        "pyramid.stage" + std::to_string(i), c_in, channels, kPyramidFactors[i], ps, rng));
  }
}

ProsodyPyramid PyramidEncoder::forward(const ExcitationSignal& excitation) {
  if (excitation.samples.empty()) throw std::invalid_argument("PyramidEncoder: empty signal");
  Tensor2D cur(static_cast<int>(excitation.samples.size()), 1);
  for (int r = 0; r < cur.rows; ++r) cur(r, 0) = excitation.samples[r];
  ProsodyPyramid p;
  for (size_t i = 0; i < stages_.size(); ++i) {
    Tensor2D y = stages_[i]->forward(cur);
    for (double& x : y.v) x = std::tanh(x);
    acts_[i] = y;
    p.levels[i] = y;
    cur = std::move(y);
  }
  return p;
}

void PyramidEncoder::backward(const std::array<Tensor2D, 4>& d_levels) {
  Tensor2D d;
  for (int i = 3; i >= 0; --i) {
    if (d.empty()) {
      d = Tensor2D(acts_[i].rows, acts_[i].cols);
    }
    if (!d_levels[i].empty()) add_inplace(d, d_levels[i]);
    // through tanh
    for (size_t j = 0; j < d.v.size(); ++j) d.v[j] *= 1.0 - acts_[i].v[j] * acts_[i].v[j];
    d = stages_[i]->backward(d);
    if (i > 0 && (d.rows != acts_[i - 1].rows || d.cols != acts_[i - 1].cols))
      throw std::runtime_error("PyramidEncoder: backward shape mismatch");
  }
}

Tensor2D length_regulate(const Tensor2D& content, const std::vector<int>& durations) {
  if (static_cast<int>(durations.size()) != content.rows)
    throw std::invalid_argument("length_regulate: durations/token mismatch");
  long frames = 0;
  for (int d : durations) {
    if (d < 1) throw std::invalid_argument("length_regulate: durations must be >= 1");
    frames += d;
  }
  Tensor2D out(static_cast<int>(frames), content.cols);
  int row = 0;
  for (int tok = 0; tok < content.rows; ++tok)
    for (int r = 0; r < durations[tok]; ++r, ++row)
      for (int c = 0; c < content.cols; ++c) out(row, c) = content(tok, c);
  return out;
}

Tensor2D length_regulate_backward(const Tensor2D& d_out, const std::vector<int>& durations,
                                  int tokens) {
  Tensor2D d(tokens, d_out.cols);
  int row = 0;
  for (int tok = 0; tok < tokens; ++tok)
    for (int r = 0; r < durations[tok]; ++r, ++row)
      for (int c = 0; c < d_out.cols; ++c) d(tok, c) += d_out(row, c);
  return d;
}

CrossAttention::CrossAttention(const std::string& name, int d_model, int kv_dim, int d_attn,
                               ParamSet& ps, std::mt19937_64& rng)
    : d_attn_(d_attn),
      wq_(name + ".q", d_model, d_attn, ps, rng),
      wk_(name + ".k", kv_dim, d_attn, ps, rng),
      wv_(name + ".v", kv_dim, d_attn, ps, rng),
      wo_(name + ".o", d_attn, d_model, ps, rng, /*zero_init=*/true) {}

Tensor2D CrossAttention::forward(const Tensor2D& queries, const Tensor2D& keys_values) {
  if (keys_values.rows == 0) throw std::invalid_argument("cross_attend: empty key sequence");
  q_in_ = queries;
  kv_in_ = keys_values;
  q_ = wq_.forward(queries);
  k_ = wk_.forward(keys_values);
  v_ = wv_.forward(keys_values);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_attn_));
  Tensor2D logits = matmul_nt(q_, k_);
  for (double& x : logits.v) x *= scale;
  attn_ = Tensor2D(logits.rows, logits.cols);
  for (int r = 0; r < logits.rows; ++r) {
    double mx = logits(r, 0);
    for (int c = 1; c < logits.cols; ++c) mx = std::max(mx, logits(r, c));
    double sum = 0.0;
    for (int c = 0; c < logits.cols; ++c) {
      attn_(r, c) = std::exp(logits(r, c) - mx);
      sum += attn_(r, c);
    }
    for (int c = 0; c < logits.cols; ++c) attn_(r, c) /= sum;
  }
  ctx_ = matmul(attn_, v_);
  Tensor2D out = wo_.forward(ctx_);
  add_inplace(out, queries);
  return out;
}

Tensor2D CrossAttention::backward(const Tensor2D& dy, Tensor2D& d_kv) {
  Tensor2D dctx = wo_.backward(dy);
  Tensor2D dA = matmul_nt(dctx, v_);
  Tensor2D dv = matmul_tn(attn_, dctx);
  // softmax backward, row-wise
  Tensor2D dlogits(dA.rows, dA.cols);
  for (int r = 0; r < dA.rows; ++r) {
    double dot = 0.0;
    for (int c = 0; c < dA.cols; ++c) dot += dA(r, c) * attn_(r, c);
    for (int c = 0; c < dA.cols; ++c) dlogits(r, c) = (dA(r, c) - dot) * attn_(r, c);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_attn_));
  Tensor2D dq = matmul(dlogits, k_);
  for (double& x : dq.v) x *= scale;
  Tensor2D dk = matmul_tn(dlogits, q_);
  for (double& x : dk.v) x *= scale;

  Tensor2D dQ = wq_.backward(dq);
  add_inplace(dQ, dy);  // residual
  d_kv = wk_.backward(dk);
  add_inplace(d_kv, wv_.backward(dv));
  return dQ;
}

Saln::Saln(const std::string& name, int d_model, int d_speaker, ParamSet& ps,
           std::mt19937_64& rng, bool zero_init_maps)
    : gamma_map_(name + ".gamma", d_speaker, d_model, ps, rng, zero_init_maps),
      delta_map_(name + ".delta", d_speaker, d_model, ps, rng, zero_init_maps) {
  for (int c = 0; c < d_model; ++c) gamma_map_.b.value(0, c) = 1.0;
}

Tensor2D Saln::forward(const Tensor2D& h, const std::vector<double>& speaker) {
  normed_ = norm_.forward(h);
  Tensor2D s_row(1, static_cast<int>(speaker.size()));
  for (size_t c = 0; c < speaker.size(); ++c) s_row(0, static_cast<int>(c)) = speaker[c];
  gamma_ = gamma_map_.forward(s_row);
  const Tensor2D delta = delta_map_.forward(s_row);
  Tensor2D out(h.rows, h.cols);
  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < h.cols; ++c) out(r, c) = normed_(r, c) * gamma_(0, c) + delta(0, c);
  return out;
}

Tensor2D Saln::backward(const Tensor2D& dy) {
  Tensor2D dgamma(1, dy.cols), ddelta(1, dy.cols);
  for (int r = 0; r < dy.rows; ++r)
    for (int c = 0; c < dy.cols; ++c) {
      dgamma(0, c) += dy(r, c) * normed_(r, c);
      ddelta(0, c) += dy(r, c);
    }
  gamma_map_.backward(dgamma);
  delta_map_.backward(ddelta);
  Tensor2D dn(dy.rows, dy.cols);
  for (int r = 0; r < dy.rows; ++r)
    for (int c = 0; c < dy.cols; ++c) dn(r, c) = dy(r, c) * gamma_(0, c);
  return norm_.backward(dn);
}

AdaptorModel::AdaptorModel(const AdaptorConfig& cfg, ParamSet& ps, std::mt19937_64& rng)
    : cfg_(cfg),
      pyramid_(cfg.pyramid_channels, ps, rng),
      flat_enc1_("adaptor.flat1", 1, cfg.d_content, ps, rng),
      flat_enc2_("adaptor.flat2", cfg.d_content, cfg.d_content, ps, rng, /*zero_init=*/true) {
  auto make_unit = [&](Unit& u, const std::string& name, bool with_attn) {
    if (with_attn)
      u.attn = std::make_unique<CrossAttention>(name + ".attn", cfg.d_content,
                                                cfg.pyramid_channels, cfg.d_attn, ps, rng);
    u.saln = std::make_unique<Saln>(name + ".saln", cfg.d_content, cfg.d_speaker, ps, rng);
    u.gate = Param(name + ".gate", 1, cfg.d_content);
    ps.add(&u.gate);
  };
  make_unit(input_unit_, "adaptor.input", false);
  for (int i = 0; i < 4; ++i) make_unit(units_[i], "adaptor.level" + std::to_string(i), true);
}

Tensor2D AdaptorModel::apply_gated_saln(Unit& u, const Tensor2D& h,
                                        const std::vector<double>& speaker) {
  u.saln_out_ = u.saln->forward(h, speaker);
  Tensor2D out = h;
  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < h.cols; ++c) out(r, c) += u.gate.value(0, c) * u.saln_out_(r, c);
  return out;
}

Tensor2D AdaptorModel::gated_saln_backward(Unit& u, const Tensor2D& dy) {
  Tensor2D ds(dy.rows, dy.cols);
  for (int r = 0; r < dy.rows; ++r)
    for (int c = 0; c < dy.cols; ++c) {
      u.gate.grad(0, c) += dy(r, c) * u.saln_out_(r, c);
      ds(r, c) = dy(r, c) * u.gate.value(0, c);
    }
  Tensor2D dh = u.saln->backward(ds);
  add_inplace(dh, dy);
  return dh;
}

AdaptorOutput AdaptorModel::adapt(const ConditionBundle& bundle,
                                  const ExcitationSignal& excitation) {
  last_path_ = LastPath::hier;
  last_durations_ = bundle.durations;
  last_tokens_ = bundle.content.rows;
  last_speaker_ = bundle.speaker;

  const ProsodyPyramid pyramid = pyramid_.forward(excitation);
  Tensor2D h = length_regulate(bundle.content, bundle.durations);
  h = apply_gated_saln(input_unit_, h, bundle.speaker);
  const std::array<int, 4> order =
      cfg_.coarse_to_fine ? std::array<int, 4>{3, 2, 1, 0} : std::array<int, 4>{0, 1, 2, 3};
  for (int level : order) {
    Tensor2D a = units_[level].attn->forward(h, pyramid.levels[level]);
    h = apply_gated_saln(units_[level], a, bundle.speaker);
  }
  return AdaptorOutput{std::move(h)};
}

AdaptorOutput AdaptorModel::adapt_flat(const ConditionBundle& bundle,
                                       const std::vector<double>& frame_f0) {
  last_path_ = LastPath::flat;
  last_durations_ = bundle.durations;
  last_tokens_ = bundle.content.rows;

  Tensor2D h = length_regulate(bundle.content, bundle.durations);
  if (static_cast<int>(frame_f0.size()) != h.rows)
    throw std::invalid_argument("adapt_flat: frame_f0 length mismatch");
  Tensor2D f0col(h.rows, 1);
  for (int r = 0; r < h.rows; ++r) f0col(r, 0) = frame_f0[r];
  flat_hidden_ = flat_enc1_.forward(f0col);
  for (double& x : flat_hidden_.v) x = std::tanh(x);
  // flat_enc2_ caches the tanh output for its own backward
  Tensor2D enc = flat_enc2_.forward(flat_hidden_);
  add_inplace(h, enc);
  return AdaptorOutput{std::move(h)};
}

Tensor2D AdaptorModel::backward(const Tensor2D& d_fused) {
  if (last_path_ == LastPath::none) throw std::runtime_error("adaptor: backward before forward");
  Tensor2D dh = d_fused;
  if (last_path_ == LastPath::flat) {
    Tensor2D dhid = flat_enc2_.backward(dh);
    for (size_t j = 0; j < dhid.v.size(); ++j)
      dhid.v[j] *= 1.0 - flat_hidden_.v[j] * flat_hidden_.v[j];
    flat_enc1_.backward(dhid);
    return length_regulate_backward(dh, last_durations_, last_tokens_);
  }

  std::array<Tensor2D, 4> d_levels;
  const std::array<int, 4> order =
      cfg_.coarse_to_fine ? std::array<int, 4>{3, 2, 1, 0} : std::array<int, 4>{0, 1, 2, 3};
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int level = *it;
    Tensor2D da = gated_saln_backward(units_[level], dh);
    Tensor2D d_kv;
    dh = units_[level].attn->backward(da, d_kv);
    if (d_levels[level].empty())
      d_levels[level] = std::move(d_kv);
    else
      add_inplace(d_levels[level], d_kv);
  }
  dh = gated_saln_backward(input_unit_, dh);
  pyramid_.backward(d_levels);
  return length_regulate_backward(dh, last_durations_, last_tokens_);
}

DurationPredictor::DurationPredictor(int d_content, int d_speaker, int hidden, ParamSet& ps,
                                     std::mt19937_64& rng)
    : l1_("duration.l1", d_content + d_speaker, hidden, ps, rng),
      l2_("duration.l2", hidden, 1, ps, rng, /*zero_init=*/true) {}

std::vector<double> DurationPredictor::forward_log(const Tensor2D& content,
                                                   const std::vector<double>& speaker) {
  Tensor2D x(content.rows, content.cols + static_cast<int>(speaker.size()));
  for (int r = 0; r < content.rows; ++r) {
    for (int c = 0; c < content.cols; ++c) x(r, c) = content(r, c);
    for (size_t c = 0; c < speaker.size(); ++c)
      x(r, content.cols + static_cast<int>(c)) = speaker[c];
  }
  relu_ = l1_.forward(x);
  for (double& v : relu_.v) v = std::max(0.0, v);
  const Tensor2D y = l2_.forward(relu_);
  std::vector<double> out(content.rows);
  for (int r = 0; r < content.rows; ++r) out[r] = y(r, 0);
  return out;
}

void DurationPredictor::backward(const std::vector<double>& d_log) {
  Tensor2D dy(static_cast<int>(d_log.size()), 1);
  for (size_t r = 0; r < d_log.size(); ++r) dy(static_cast<int>(r), 0) = d_log[r];
  Tensor2D dh = l2_.backward(dy);
  for (size_t j = 0; j < dh.v.size(); ++j)
    if (relu_.v[j] <= 0.0) dh.v[j] = 0.0;
  l1_.backward(dh);
}

std::vector<int> DurationPredictor::predict(const Tensor2D& content,
                                            const std::vector<double>& speaker) {
  const std::vector<double> log_dur = forward_log(content, speaker);
  std::vector<int> out(log_dur.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = std::max(1L, std::lround(std::exp(log_dur[i])));
  return out;
}

}  // namespace prosody
