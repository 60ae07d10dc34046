// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "prosody/denoiser.hpp"
#include "prosody/diffusion.hpp"
#include "prosody/excitation.hpp"
#include "prosody/f0.hpp"

namespace {

using namespace prosody;

void BM_Excitation(benchmark::State& state) {
  SampleTrack track;
  track.sample_rate = 16000;
  track.f0.assign(size_t(state.range(0)), 180.0);
  track.gate.assign(track.f0.size(), 1);
  for (auto _ : state) {
    auto sig = synthesize(track);
    benchmark::DoNotOptimize(sig.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Excitation)->Arg(16000)->Arg(64000);

DenoiserConfig small_cfg() {
  DenoiserConfig cfg;
  cfg.hidden = 32;
  cfg.d_content = 16;
  cfg.d_speaker = 8;
  cfg.step_dim = 32;
  cfg.blocks = 3;
  return cfg;
}

void BM_DenoiserForward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  Denoiser model(small_cfg(), rng);
  const int frames = int(state.range(0));
  Tensor2D x(frames, 1), content(frames, 16);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& v : x.v) v = g(rng);
  for (double& v : content.v) v = g(rng);
  std::vector<double> speaker(8, 0.1);
  for (auto _ : state) {
    auto y = model.forward(x, 10, content, speaker);
    benchmark::DoNotOptimize(y.v.data());
  }
}
BENCHMARK(BM_DenoiserForward)->Arg(64)->Arg(256);

void BM_DenoiserTrainStep(benchmark::State& state) {
  std::mt19937_64 rng(2);
  Denoiser model(small_cfg(), rng);
  const int frames = 128;
  Tensor2D x(frames, 1), content(frames, 16);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& v : x.v) v = g(rng);
  for (double& v : content.v) v = g(rng);
  std::vector<double> speaker(8, 0.1);
  for (auto _ : state) {
    model.params().zero_grad();
    Tensor2D y = model.forward(x, 10, content, speaker);
    for (double& v : y.v) v *= 2.0 / y.v.size();
    auto dx = model.backward_tensor(y);
    benchmark::DoNotOptimize(dx.v.data());
  }
}
BENCHMARK(BM_DenoiserTrainStep);

void BM_Sampling(benchmark::State& state) {
  std::mt19937_64 init_rng(3);
  Denoiser model(small_cfg(), init_rng);
  const NoiseSchedule sched = make_default_schedule(int(state.range(0)));
  Conditioning cond;
  const int frames = 128;
  cond.content = Tensor2D(frames, 16);
  std::normal_distribution<double> g(0.0, 1.0);
  std::mt19937_64 rng(4);
  for (double& v : cond.content.v) v = g(rng);
  cond.speaker.assign(8, 0.1);
  for (auto _ : state) {
    auto out = sample(cond, frames, sched, model, rng);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Sampling)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
