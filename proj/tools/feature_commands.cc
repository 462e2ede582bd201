// tools/feature_commands.cc

// Copyright 2026  The asvq Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <memory>

#include "asvq/features.h"
#include "asvq/synth.h"
#include "commands.h"

namespace asvq::tools {

namespace {

void AddFrontendOptions(CLI::App *cmd, FrontendConfig *fc) {
  cmd->add_option("--window-ms", fc->window_ms, "Analysis window")->capture_default_str();
  cmd->add_option("--hop-ms", fc->hop_ms, "Frame shift")->capture_default_str();
  cmd->add_option("--n-cepstra", fc->n_cepstra, "Static cepstra (c0 excluded)")
      ->capture_default_str();
  cmd->add_option("--n-mel", fc->n_mel_filters, "Mel filters")->capture_default_str();
  cmd->add_option("--sad-db", fc->sad_threshold_db, "SAD threshold below peak energy")
      ->capture_default_str();
  cmd->add_option("--delta-window", fc->delta_window, "Delta regression half-width")
      ->capture_default_str();
}

TruncationMode ParseMode(const std::string &mode) {
  if (mode == "eval_skip500") return TruncationMode::kEvalSkip500;
  if (mode == "random_start") return TruncationMode::kRandomStart;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown truncation mode '" + mode + "' (eval_skip500|random_start)");
}

void RegisterMfcc(CLI::App &app) {
  struct Opts {
    std::string in, out;
    bool static_only = false;
    FrontendConfig fc;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand(
      "mfcc", "WAV -> FTR1 features (MFCC, SAD, deltas, CMVN)");
  cmd->add_option("--in", o->in, "8 kHz mono PCM16 WAV")->required();
  cmd->add_option("--out", o->out, "Output FTR1 file")->required();
  cmd->add_flag("--static-only", o->static_only,
                "Write static cepstra for every frame, no SAD/deltas/CMVN");
  AddFrontendOptions(cmd, &o->fc);
  cmd->callback([o] {
    const AudioBuffer audio = ReadWav(std::filesystem::path(o->in));
    const FeatureMatrix feats =
        o->static_only ? ComputeMfcc(audio, o->fc) : ExtractFeatures(audio, o->fc);
    WriteFeatures(std::filesystem::path(o->out), feats);
  });
}

void RegisterTruncate(CLI::App &app) {
  struct Opts {
    std::string in, out, mode = "eval_skip500";
    int frames = 200;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("truncate", "Cut n active frames from an FTR1 file");
  cmd->add_option("--in", o->in, "Input FTR1 (active frames)")->required();
  cmd->add_option("--out", o->out, "Output FTR1")->required();
  cmd->add_option("--frames", o->frames, "Frames to keep")->capture_default_str();
  cmd->add_option("--mode", o->mode, "eval_skip500 | random_start")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Seed for random_start")->capture_default_str();
  cmd->callback([o] {
    const FeatureMatrix feats = ReadFeatures(std::filesystem::path(o->in));
    WriteFeatures(std::filesystem::path(o->out),
                  TruncateActive(feats, o->frames, ParseMode(o->mode), o->seed));
  });
}

void RegisterSynth(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string out_dir;
    SynthConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand(
      "synth", "Write a synthetic corpus: <utt>.ftr, manifest.txt, generator_ubm.ubm");
  SynthConfig &c = o->cfg;
  cmd->add_option("--out-dir", o->out_dir, "Output directory")->required();
  cmd->add_option("--n-speakers", c.n_speakers)->capture_default_str();
  cmd->add_option("--utts-per-speaker", c.utts_per_speaker)->capture_default_str();
  cmd->add_option("--frames-per-utt", c.frames_per_utt)->capture_default_str();
  cmd->add_option("--k", c.num_components, "Generator components")->capture_default_str();
  cmd->add_option("--dim", c.dim, "Feature dimension")->capture_default_str();
  cmd->add_option("--speaker-shift", c.speaker_shift_scale)->capture_default_str();
  cmd->add_option("--speaker-rank", c.speaker_rank, "0 = full rank")->capture_default_str();
  cmd->add_option("--session-shift", c.session_shift_scale)->capture_default_str();
  cmd->add_option("--session-rank", c.session_rank, "0 = full rank")->capture_default_str();
  cmd->add_option("--run-length", c.mean_run_length)->capture_default_str();
  cmd->add_option("--noise-max", c.noise_fraction_max)->capture_default_str();
  cmd->add_option("--noise-skew", c.noise_skew)->capture_default_str();
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->callback([o, &global] {
    const std::filesystem::path dir(o->out_dir);
    EnsureDirectory(dir);
    const SynthCorpus corpus = SynthCorpusFromConfig(o->cfg, global.parallel());
    std::vector<ManifestEntry> manifest;
    for (const Utterance &u : corpus.utterances) {
      WriteFeatures(UttPath(dir, u.id, ".ftr"), u.features);
      manifest.push_back({u.id, u.speaker, static_cast<long long>(u.features.rows())});
    }
    WriteManifest(dir / "manifest.txt", manifest);
    WriteGmm(dir / "generator_ubm.ubm", corpus.generator_ubm);
  });
}

}  // namespace

void RegisterFeatureCommands(CLI::App &app, const GlobalOptions &global) {
  RegisterMfcc(app);
  RegisterTruncate(app);
  RegisterSynth(app, global);
}

}  // namespace asvq::tools
