// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Every subcommand takes --config, --seed, --out;
// errors exit nonzero with a category prefix (config: / io: / train: /
// internal:).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "prosody/corpus.hpp"
#include "prosody/diffusion.hpp"
#include "prosody/pipeline.hpp"

namespace fs = std::filesystem;
using namespace prosody;

namespace {

struct CommonArgs {
  std::string config_path;
  uint64_t seed = 0;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "key = value config file");
  cmd->add_option("--seed", a.seed, "run seed")->required();
  cmd->add_option("--out", a.out_dir, "output directory")->required();
}

RunConfig resolve_config(const CommonArgs& a) {
  if (a.config_path.empty()) {
    RunConfig cfg;
    cfg.validate();
    return cfg;
  }
  return load_config(a.config_path);
}

int cmd_gen_corpus(const CommonArgs& a) {
  const RunConfig cfg = resolve_config(a);
  const Corpus corpus = generate_corpus(cfg, a.seed);
  save_corpus(corpus, a.out_dir);
  std::cout << "corpus: " << corpus.train.size() << " train, " << corpus.val.size() << " val, "
            << corpus.test.size() << " test utterances -> " << a.out_dir << "\n";
  return 0;
}

int cmd_train_pitch(const CommonArgs& a, bool regressor) {
  const RunConfig cfg = resolve_config(a);
  const Corpus corpus = generate_corpus(cfg, a.seed);
  const TrainPitchResult r =
      train_pitch_predictor(cfg, corpus, a.seed, a.out_dir,
                            regressor ? PitchHead::regressor : PitchHead::diffusion);
  std::cout << "train-pitch: early avg " << r.early_avg << ", final avg " << r.final_avg
            << ", best val " << r.best_val << "\n"
            << "checkpoint: " << r.checkpoint_path << "\n";
  return 0;
}

int cmd_train_adaptor(const CommonArgs& a, bool flat) {
  const RunConfig cfg = resolve_config(a);
  const Corpus corpus = generate_corpus(cfg, a.seed);
  const ProbeResult r = train_adaptor_probe(cfg, corpus, a.seed, a.out_dir, flat);
  std::cout << "train-adaptor: train mse " << r.train_mse << ", held-out mse " << r.test_mse
            << ", held-out jitter " << r.test_jitter << "\n"
            << "checkpoint: " << r.checkpoint_path << "\n";
  return 0;
}

int cmd_sample(const CommonArgs& a, const std::string& checkpoint, bool wav) {
  const RunConfig cfg = resolve_config(a);
  if (!fs::exists(checkpoint))
    throw std::ios_base::failure("checkpoint not found: " + checkpoint);
  const Corpus corpus = generate_corpus(cfg, a.seed);
  LoadedPredictor lp = load_predictor(checkpoint);
  const auto& utts = corpus.val.empty() ? corpus.test : corpus.val;
  const size_t n = std::min<size_t>(utts.size(), cfg.sample_utterances);
  const std::vector<SyntheticUtterance> chosen(utts.begin(), utts.begin() + n);
  const SampleResult r = sample_contours(corpus, lp, chosen, a.seed, a.out_dir, wav);
  std::cout << "sample: voiced rmse " << r.rmse_hz << " Hz (baseline " << r.baseline_rmse_hz
            << " Hz) over " << n << " utterances\n";
  return 0;
}

int cmd_ablate(const CommonArgs& a) {
  const RunConfig cfg = resolve_config(a);
  const std::vector<AblationRow> rows = run_ablation(cfg, a.seed, a.out_dir);
  for (const auto& r : rows)
    std::cout << r.arm << ": rmse " << r.rmse_hz << " Hz, diversity " << r.diversity_hz
              << " Hz, jitter " << r.pitch_jitter << ", probe mse " << r.probe_mse
              << ", probe jitter " << r.probe_jitter << "\n";
  return 0;
}

int cmd_export_schedule(const CommonArgs& a) {
  const RunConfig cfg = resolve_config(a);
  const NoiseSchedule s = schedule_from_config(cfg);
  fs::create_directories(a.out_dir);
  const std::string path = (fs::path(a.out_dir) / "schedule.txt").string();
  save_schedule(s, path);
  std::cout << "schedule: T=" << s.T << " -> " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prosody modeling toolkit: synthetic pitch corpora, diffusion pitch "
               "prediction, sinusoidal excitation, hierarchical prosody adaptor"};
  app.require_subcommand(1);

  CommonArgs gen_a, pitch_a, adaptor_a, sample_a, ablate_a, sched_a;
  bool pitch_regressor = false, adaptor_flat = false, sample_wav = false;
  std::string sample_checkpoint;

  add_common(app.add_subcommand("gen-corpus", "generate and save a synthetic corpus"), gen_a);

  CLI::App* pitch = app.add_subcommand("train-pitch", "train the diffusion pitch predictor");
  add_common(pitch, pitch_a);
  pitch->add_flag("--regressor", pitch_regressor, "direct MSE head instead of diffusion");

  CLI::App* adaptor = app.add_subcommand("train-adaptor", "train the prosody adaptor probe");
  add_common(adaptor, adaptor_a);
  adaptor->add_flag("--flat", adaptor_flat, "flat (non-hierarchical) conditioning path");

  CLI::App* samp = app.add_subcommand("sample", "sample pitch contours from a checkpoint");
  add_common(samp, sample_a);
  samp->add_option("--checkpoint", sample_checkpoint, "trained predictor checkpoint")->required();
  samp->add_flag("--wav", sample_wav, "also write excitation WAVs");

  add_common(app.add_subcommand("ablate", "run the three-arm ablation"), ablate_a);
  add_common(app.add_subcommand("export-schedule", "write the noise schedule table"), sched_a);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("gen-corpus")) return cmd_gen_corpus(gen_a);
    if (app.got_subcommand("train-pitch")) return cmd_train_pitch(pitch_a, pitch_regressor);
    if (app.got_subcommand("train-adaptor")) return cmd_train_adaptor(adaptor_a, adaptor_flat);
    if (app.got_subcommand("sample")) return cmd_sample(sample_a, sample_checkpoint, sample_wav);
    if (app.got_subcommand("ablate")) return cmd_ablate(ablate_a);
    if (app.got_subcommand("export-schedule")) return cmd_export_schedule(sched_a);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
