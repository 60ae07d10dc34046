// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <random>
#include <vector>

#include "prosody/diffusion.hpp"
#include "prosody/nn.hpp"

namespace prosody {

struct DenoiserConfig {
  int hidden = 64;
  int d_content = 32;
  int d_speaker = 16;
  int step_dim = 64;  // even
  int blocks = 2;     // dilations cycle through {1, 2}
  // stop: conditioning inputs receive no gradient. clip: input gradients are
  // norm-clipped to input_grad_max instead (the literal reading).
  enum class InputGradMode { stop, clip };
  InputGradMode input_grad_mode = InputGradMode::stop;
  double input_grad_max = 1.0;
};

// Conditional noise predictor eps_theta(x_t, C_t, S, t): projection-and-add
// conditioning into a small gated convolution stack.
class Denoiser : public TrainableEpsilonModel {
 public:
  Denoiser(const DenoiserConfig& cfg, std::mt19937_64& rng);

  // mask (optional): rows with mask 0 are zeroed after every stage, so their
  // activations and gradients stay exactly 0.
  Tensor2D forward(const Tensor2D& x_t, int t, const Tensor2D& content,
                   const std::vector<double>& speaker,
                   const std::vector<uint8_t>& mask = {});
  // Accumulates parameter gradients; returns d(loss)/d(x_t).
  Tensor2D backward_tensor(const Tensor2D& upstream);

  // Gradient that reached the conditioning content in the last backward.
  // All-zero in stop mode; norm-clipped in clip mode.
  const Tensor2D& content_grad() const { return content_grad_; }

  // TrainableEpsilonModel (sequence-of-scalars view).
  std::vector<double> predict(const std::vector<double>& x_t, int t,
                              const Conditioning& cond) override;
  void backward(const std::vector<double>& upstream) override;

  ParamSet& params() { return params_; }
  const DenoiserConfig& config() const { return cfg_; }

 private:
  void apply_mask(Tensor2D& h) const;

  DenoiserConfig cfg_;
  ParamSet params_;
  Linear in_proj_, cond_proj_, spk_proj_, step_proj_, out_proj_;
  std::vector<std::unique_ptr<GatedConvBlock>> blocks_;
  std::vector<uint8_t> mask_;
  Tensor2D content_grad_;
};

}  // namespace prosody
