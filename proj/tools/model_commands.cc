// tools/model_commands.cc

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

#include <memory>

#include "asvq/bw_stats.h"
#include "asvq/gmm.h"
#include "asvq/ivector.h"
#include "asvq/plda.h"
#include "commands.h"

namespace asvq::tools {

namespace {

namespace fs = std::filesystem;

std::vector<FeatureMatrix> LoadFeatures(const std::vector<ManifestEntry> &manifest,
                                        const fs::path &dir, const Parallelism &par) {
  std::vector<FeatureMatrix> out(manifest.size());
  ParallelFor(manifest.size(), par, [&](std::size_t i) {
    out[i] = ReadFeatures(UttPath(dir, manifest[i].utt_id, ".ftr"));
  });
  return out;
}

std::vector<BwStats> LoadStats(const std::vector<ManifestEntry> &manifest,
                               const fs::path &dir, const Parallelism &par) {
  std::vector<BwStats> out(manifest.size());
  ParallelFor(manifest.size(), par, [&](std::size_t i) {
    out[i] = ReadBwStats(UttPath(dir, manifest[i].utt_id, ".bws"));
  });
  return out;
}

void RegisterTrainUbm(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string manifest, feat_dir, out;
    int k = 512;
    EmConfig em;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("train-ubm", "EM training of a diagonal UBM");
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--feat-dir", o->feat_dir, "Directory of <utt>.ftr")->required();
  cmd->add_option("--out", o->out, "Output UBM1 file")->required();
  cmd->add_option("--k", o->k, "Mixture components")->capture_default_str();
  cmd->add_option("--iters", o->em.n_iters, "EM iterations")->capture_default_str();
  cmd->add_option("--tol", o->em.convergence_tol, "Relative LL change to stop")
      ->capture_default_str();
  cmd->add_option("--var-floor", o->em.variance_floor, "Fraction of global variance")
      ->capture_default_str();
  cmd->add_option("--kmeans-iters", o->em.kmeans_init_iters)->capture_default_str();
  cmd->add_option("--seed", o->em.seed)->capture_default_str();
  cmd->callback([o, &global] {
    const auto manifest = LoadManifest(o->manifest);
    const auto feats = LoadFeatures(manifest, o->feat_dir, global.parallel());
    EmConfig em = o->em;
    em.parallel = global.parallel();
    WriteGmm(fs::path(o->out), TrainUbm(feats, o->k, em));
  });
}

void RegisterBwStats(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string ubm, manifest, feat_dir, out_dir;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("bw-stats", "Baum-Welch statistics -> <utt>.bws");
  cmd->add_option("--ubm", o->ubm)->required();
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--feat-dir", o->feat_dir)->required();
  cmd->add_option("--out-dir", o->out_dir)->required();
  cmd->callback([o, &global] {
    const Gmm ubm = ReadGmm(fs::path(o->ubm));
    const GmmEvaluator eval(ubm);
    const auto manifest = LoadManifest(o->manifest);
    EnsureDirectory(o->out_dir);
    ParallelFor(manifest.size(), global.parallel(), [&](std::size_t i) {
      const std::string &utt = manifest[i].utt_id;
      const FeatureMatrix feats = ReadFeatures(UttPath(o->feat_dir, utt, ".ftr"));
      WriteBwStats(UttPath(o->out_dir, utt, ".bws"), AccumulateBw(eval, ubm, feats));
    });
  });
}

void RegisterAdapt(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string ubm, manifest, stats_dir, out_dir;
    double relevance = 16.0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("adapt", "Mean-only MAP adaptation -> <utt>.ubm");
  cmd->add_option("--ubm", o->ubm)->required();
  cmd->add_option("--manifest", o->manifest, "Enrollment utterances")->required();
  cmd->add_option("--stats-dir", o->stats_dir)->required();
  cmd->add_option("--out-dir", o->out_dir)->required();
  cmd->add_option("--relevance", o->relevance)->capture_default_str();
  cmd->callback([o, &global] {
    const Gmm ubm = ReadGmm(fs::path(o->ubm));
    const auto manifest = LoadManifest(o->manifest);
    EnsureDirectory(o->out_dir);
    ParallelFor(manifest.size(), global.parallel(), [&](std::size_t i) {
      const std::string &utt = manifest[i].utt_id;
      const BwStats stats = ReadBwStats(UttPath(o->stats_dir, utt, ".bws"));
      WriteGmm(UttPath(o->out_dir, utt, ".ubm"), MapAdaptMeans(ubm, stats, o->relevance));
    });
  });
}

void RegisterScoreGmm(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string ubm, trials, model_dir, feat_dir, out;
    bool raw_sum = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("score-gmm", "GMM-UBM log-likelihood ratio scoring");
  cmd->add_option("--ubm", o->ubm)->required();
  cmd->add_option("--trials", o->trials)->required();
  cmd->add_option("--model-dir", o->model_dir, "Directory of <enroll-id>.ubm")->required();
  cmd->add_option("--feat-dir", o->feat_dir, "Directory of <test-id>.ftr")->required();
  cmd->add_option("--out", o->out, "Score file")->required();
  cmd->add_flag("--raw-sum", o->raw_sum, "Sum frame LLRs instead of averaging");
  cmd->callback([o, &global] {
    const Gmm ubm = ReadGmm(fs::path(o->ubm));
    const std::vector<Trial> trials = ReadTrials(fs::path(o->trials));
    std::map<std::string, Gmm> models;
    std::map<std::string, FeatureMatrix> tests;
    for (const Trial &t : trials) {
      if (!models.count(t.enroll_id))
        models.emplace(t.enroll_id, ReadGmm(UttPath(o->model_dir, t.enroll_id, ".ubm")));
      if (!tests.count(t.test_id))
        tests.emplace(t.test_id, ReadFeatures(UttPath(o->feat_dir, t.test_id, ".ftr")));
    }
    const LlrNormalization norm =
        o->raw_sum ? LlrNormalization::kRawSum : LlrNormalization::kFrameAverage;
    std::vector<ScoredTrial> scores(trials.size());
    ParallelFor(trials.size(), global.parallel(), [&](std::size_t i) {
      const Trial &t = trials[i];
      scores[i] = {t.enroll_id, t.test_id,
                   ScoreGmmUbm(models.at(t.enroll_id), ubm, tests.at(t.test_id), norm)};
    });
    WriteScores(fs::path(o->out), scores);
  });
}

void RegisterTrainTv(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string ubm, manifest, stats_dir, out;
    TvConfig tv;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("train-tv", "Total variability subspace EM");
  cmd->add_option("--ubm", o->ubm)->required();
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--stats-dir", o->stats_dir)->required();
  cmd->add_option("--out", o->out, "Output TVM1 file")->required();
  cmd->add_option("--rank", o->tv.rank, "i-vector dimension")->capture_default_str();
  cmd->add_option("--iters", o->tv.n_iters)->capture_default_str();
  cmd->add_option("--seed", o->tv.seed)->capture_default_str();
  cmd->callback([o, &global] {
    const Gmm ubm = ReadGmm(fs::path(o->ubm));
    const auto manifest = LoadManifest(o->manifest);
    const auto stats = LoadStats(manifest, o->stats_dir, global.parallel());
    TvConfig tv = o->tv;
    tv.parallel = global.parallel();
    WriteTvModel(fs::path(o->out), TrainTv(ubm, stats, tv));
  });
}

void RegisterExtractIvec(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string tv, manifest, stats_dir, out;
    bool length_norm = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("extract-ivec", "i-vector extraction -> IVC1 file");
  cmd->add_option("--tv", o->tv)->required();
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--stats-dir", o->stats_dir)->required();
  cmd->add_option("--out", o->out)->required();
  cmd->add_flag("--length-norm", o->length_norm, "Scale every i-vector to unit length");
  cmd->callback([o, &global] {
    const IvectorExtractor extractor(ReadTvModel(fs::path(o->tv)));
    const auto manifest = LoadManifest(o->manifest);
    std::vector<IVector> ivecs(manifest.size());
    ParallelFor(manifest.size(), global.parallel(), [&](std::size_t i) {
      const std::string &utt = manifest[i].utt_id;
      ivecs[i] = extractor.Extract(ReadBwStats(UttPath(o->stats_dir, utt, ".bws")), utt);
      if (o->length_norm) ivecs[i] = LengthNormalize(ivecs[i]);
    });
    WriteIvectors(fs::path(o->out), ivecs);
  });
}

void RegisterTrainPlda(CLI::App &app) {
  struct Opts {
    std::string ivectors, manifest, out;
    PldaConfig plda;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("train-plda", "Two-covariance PLDA EM");
  cmd->add_option("--ivectors", o->ivectors)->required();
  cmd->add_option("--manifest", o->manifest, "Speaker labels")->required();
  cmd->add_option("--out", o->out, "Output PLD1 file")->required();
  cmd->add_option("--rank", o->plda.rank, "Speaker subspace rank")->capture_default_str();
  cmd->add_option("--iters", o->plda.n_iters)->capture_default_str();
  cmd->callback([o] {
    const std::vector<IVector> ivecs = ReadIvectors(fs::path(o->ivectors));
    const auto speakers_of = SpeakerMap(LoadManifest(o->manifest));
    std::vector<std::string> speakers;
    for (const IVector &iv : ivecs) {
      const auto it = speakers_of.find(iv.source_utt);
      if (it == speakers_of.end())
        throw Error(ErrorKind::kInvalidArgument,
                    "i-vector '" + iv.source_utt + "' has no manifest entry");
      speakers.push_back(it->second);
    }
    WritePldaModel(fs::path(o->out), TrainPlda(ivecs, speakers, o->plda));
  });
}

void RegisterScorePlda(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string plda, ivectors, trials, out;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("score-plda", "PLDA log-likelihood ratio scoring");
  cmd->add_option("--plda", o->plda)->required();
  cmd->add_option("--ivectors", o->ivectors, "IVC1 file holding enroll and test ids")
      ->required();
  cmd->add_option("--trials", o->trials)->required();
  cmd->add_option("--out", o->out)->required();
  cmd->callback([o, &global] {
    const PldaScorer scorer(ReadPldaModel(fs::path(o->plda)));
    std::map<std::string, IVector> by_id;
    for (IVector &iv : ReadIvectors(fs::path(o->ivectors)))
      by_id.emplace(iv.source_utt, std::move(iv));
    const std::vector<Trial> trials = ReadTrials(fs::path(o->trials));
    auto lookup = [&](const std::string &id) -> const IVector & {
      const auto it = by_id.find(id);
      if (it == by_id.end())
        throw Error(ErrorKind::kInvalidArgument, "no i-vector for '" + id + "'");
      return it->second;
    };
    for (const Trial &t : trials) {
      lookup(t.enroll_id);
      lookup(t.test_id);
    }
    std::vector<ScoredTrial> scores(trials.size());
    ParallelFor(trials.size(), global.parallel(), [&](std::size_t i) {
      const Trial &t = trials[i];
      scores[i] = {t.enroll_id, t.test_id, scorer.Score(lookup(t.enroll_id), lookup(t.test_id))};
    });
    WriteScores(fs::path(o->out), scores);
  });
}

}  // namespace

void RegisterModelCommands(CLI::App &app, const GlobalOptions &global) {
  RegisterTrainUbm(app, global);
  RegisterBwStats(app, global);
  RegisterAdapt(app, global);
  RegisterScoreGmm(app, global);
  RegisterTrainTv(app, global);
  RegisterExtractIvec(app, global);
  RegisterTrainPlda(app);
  RegisterScorePlda(app, global);
}

}  // namespace asvq::tools
