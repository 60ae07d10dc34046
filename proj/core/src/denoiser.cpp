// SPDX-License-Identifier: Apache-2.0
#include "prosody/denoiser.hpp"

#include <stdexcept>

namespace prosody {

Denoiser::Denoiser(const DenoiserConfig& cfg, std::mt19937_64& rng)
    : cfg_(cfg),
      in_proj_("denoiser.in", 1, cfg.hidden, params_, rng),
      cond_proj_("denoiser.cond", cfg.d_content, cfg.hidden, params_, rng),
      spk_proj_("denoiser.spk", cfg.d_speaker, cfg.hidden, params_, rng),
      step_proj_("denoiser.step", cfg.step_dim, cfg.hidden, params_, rng),
      out_proj_("denoiser.out", cfg.hidden, 1, params_, rng, /*zero_init=*/true) {
  for (int i = 0; i < cfg.blocks; ++i) {
    const int dilation = (i % 2 == 0) ? 1 : 2;
    blocks_.push_back(std::make_unique<GatedConvBlock>(
        "denoiser.block" + std::to_string(i), cfg.hidden, dilation, params_, rng));
  }
}

void Denoiser::apply_mask(Tensor2D& h) const {
  if (mask_.empty()) return;
  for (int r = 0; r < h.rows; ++r)
    if (!mask_[r])
      for (int c = 0; c < h.cols; ++c) h(r, c) = 0.0;
}

Tensor2D Denoiser::forward(const Tensor2D& x_t, int t, const Tensor2D& content,
                           const std::vector<double>& speaker,
                           const std::vector<uint8_t>& mask) {
  if (x_t.cols != 1) throw std::invalid_argument("denoiser: x_t must be time x 1");
  if (content.rows != x_t.rows) throw std::invalid_argument("denoiser: content length mismatch");
  if (content.cols != cfg_.d_content) throw std::invalid_argument("denoiser: content dim mismatch");
  if (static_cast<int>(speaker.size()) != cfg_.d_speaker)
    throw std::invalid_argument("denoiser: speaker dim mismatch");
  if (!mask.empty() && static_cast<int>(mask.size()) != x_t.rows)
    throw std::invalid_argument("denoiser: mask length mismatch");
  mask_ = mask;

  Tensor2D h = in_proj_.forward(x_t);
  add_inplace(h, cond_proj_.forward(content));

  Tensor2D s_row(1, cfg_.d_speaker);
  for (int c = 0; c < cfg_.d_speaker; ++c) s_row(0, c) = speaker[c];
  const Tensor2D s_proj = spk_proj_.forward(s_row);

  const std::vector<double> emb = step_embedding(t, cfg_.step_dim);
  Tensor2D e_row(1, cfg_.step_dim);
  for (int c = 0; c < cfg_.step_dim; ++c) e_row(0, c) = emb[c];
  const Tensor2D e_proj = step_proj_.forward(e_row);

  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < cfg_.hidden; ++c) h(r, c) += s_proj(0, c) + e_proj(0, c);
  apply_mask(h);

  for (auto& block : blocks_) {
    h = block->forward(h);
    apply_mask(h);
  }
  Tensor2D y = out_proj_.forward(h);
  apply_mask(y);
  return y;
}

Tensor2D Denoiser::backward_tensor(const Tensor2D& upstream) {
  Tensor2D d = upstream;
  apply_mask(d);
  Tensor2D dh = out_proj_.backward(d);
  apply_mask(dh);
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
    dh = (*it)->backward(dh);
    apply_mask(dh);
  }
  // Broadcast additions: speaker and step projections see the row sum.
  Tensor2D d_broadcast(1, dh.cols);
  for (int r = 0; r < dh.rows; ++r)
    for (int c = 0; c < dh.cols; ++c) d_broadcast(0, c) += dh(r, c);
  spk_proj_.backward(d_broadcast);
  step_proj_.backward(d_broadcast);

  Tensor2D d_content = cond_proj_.backward(dh);
  if (cfg_.input_grad_mode == DenoiserConfig::InputGradMode::stop) {
    d_content.fill(0.0);
  } else {
    double sq = 0.0;
    for (double g : d_content.v) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > cfg_.input_grad_max)
      for (double& g : d_content.v) g *= cfg_.input_grad_max / norm;
  }
  content_grad_ = d_content;

  return in_proj_.backward(dh);
}

std::vector<double> Denoiser::predict(const std::vector<double>& x_t, int t,
                                      const Conditioning& cond) {
  Tensor2D x(static_cast<int>(x_t.size()), 1);
  for (size_t i = 0; i < x_t.size(); ++i) x(static_cast<int>(i), 0) = x_t[i];
  const Tensor2D y = forward(x, t, cond.content, cond.speaker);
  std::vector<double> out(x_t.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = y(static_cast<int>(i), 0);
  return out;
}

void Denoiser::backward(const std::vector<double>& upstream) {
  Tensor2D d(static_cast<int>(upstream.size()), 1);
  for (size_t i = 0; i < upstream.size(); ++i) d(static_cast<int>(i), 0) = upstream[i];
  backward_tensor(d);
}

}  // namespace prosody
