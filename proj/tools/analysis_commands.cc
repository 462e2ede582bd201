// tools/analysis_commands.cc

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

#include <fstream>
#include <iostream>
#include <memory>
#include <utility>

#include "asvq/bw_stats.h"
#include "asvq/experiment.h"
#include "asvq/fusion.h"
#include "asvq/metrics.h"
#include "commands.h"

namespace asvq::tools {

namespace {

namespace fs = std::filesystem;
using TrialKey = std::pair<std::string, std::string>;

std::map<TrialKey, double> ScoreMap(const fs::path &path) {
  std::map<TrialKey, double> out;
  for (const ScoredTrial &s : ReadScores(path))
    if (!out.emplace(TrialKey{s.enroll_id, s.test_id}, s.score).second)
      throw Error(ErrorKind::kFormat, path.string() + ": duplicate trial " + s.enroll_id +
                                          " " + s.test_id);
  return out;
}

double Lookup(const std::map<TrialKey, double> &scores, const TrialKey &key,
              const std::string &what) {
  const auto it = scores.find(key);
  if (it == scores.end())
    throw Error(ErrorKind::kInvalidArgument,
                what + " has no score for trial " + key.first + " " + key.second);
  return it->second;
}

std::optional<double> LookupQuality(const std::map<std::string, double> *q,
                                    const std::string &id) {
  if (!q) return std::nullopt;
  const auto it = q->find(id);
  if (it == q->end())
    throw Error(ErrorKind::kInvalidArgument, "quality file has no entry for '" + id + "'");
  return it->second;
}

// Joins labeled (or unlabeled) trial pairs with both base-system scores and
// optional qualities.
std::vector<TrialRecord> JoinTrials(const std::vector<Trial> &trials,
                                    const std::string &gmm_path,
                                    const std::string &ivec_path,
                                    const std::string &quality_path) {
  const auto gmm = ScoreMap(gmm_path);
  const auto ivec = ScoreMap(ivec_path);
  std::map<std::string, double> quality;
  if (!quality_path.empty()) quality = ReadQualities(fs::path(quality_path));
  const std::map<std::string, double> *q = quality_path.empty() ? nullptr : &quality;
  std::vector<TrialRecord> out;
  for (const Trial &t : trials) {
    const TrialKey key{t.enroll_id, t.test_id};
    TrialRecord r;
    r.enroll_id = t.enroll_id;
    r.test_id = t.test_id;
    r.is_target = t.is_target;
    r.scores = {Lookup(gmm, key, gmm_path), Lookup(ivec, key, ivec_path)};
    r.q_enroll = LookupQuality(q, t.enroll_id);
    r.q_test = LookupQuality(q, t.test_id);
    out.push_back(std::move(r));
  }
  return out;
}

void RegisterQuality(CLI::App &app) {
  struct Opts {
    std::string ubm, manifest, stats_dir, out;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("quality", "Per-utterance quality Q from statistics");
  cmd->add_option("--ubm", o->ubm)->required();
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--stats-dir", o->stats_dir)->required();
  cmd->add_option("--out", o->out, "Quality sidecar <utt-id> <Q>")->required();
  cmd->callback([o] {
    const Gmm ubm = ReadGmm(fs::path(o->ubm));
    std::vector<std::pair<std::string, double>> q;
    for (const ManifestEntry &e : LoadManifest(o->manifest)) {
      const BwStats stats = ReadBwStats(UttPath(o->stats_dir, e.utt_id, ".bws"));
      q.emplace_back(e.utt_id, Quality(NormalizeZeroth(stats), ubm));
    }
    std::ofstream os(o->out, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::kIo, "cannot open '" + o->out + "' for writing");
    WriteQualities(os, q);
  });
}

void RegisterNbsAnalyze(CLI::App &app) {
  struct Opts {
    std::string manifest, stats_dir, label, stats_csv, pca_csv;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand(
      "nbs-analyze", "Population mean/std and PCA of normalized statistics (CSV)");
  cmd->add_option("--manifest", o->manifest)->required();
  cmd->add_option("--stats-dir", o->stats_dir)->required();
  cmd->add_option("--label", o->label, "Condition label");
  cmd->add_option("--stats-csv", o->stats_csv, "component,mean,std output")->required();
  cmd->add_option("--pca-csv", o->pca_csv, "utt_id,pc1,pc2 output")->required();
  cmd->callback([o] {
    std::vector<std::string> ids;
    std::vector<Nbs> nbs;
    for (const ManifestEntry &e : LoadManifest(o->manifest)) {
      ids.push_back(e.utt_id);
      nbs.push_back(NormalizeZeroth(ReadBwStats(UttPath(o->stats_dir, e.utt_id, ".bws"))));
    }
    const NbsPopulation pop = NbsPopulationStats(nbs, o->label);
    const PcaProjection pca = PcaProject(nbs, 2);
    std::ofstream stats_os(o->stats_csv, std::ios::binary | std::ios::trunc);
    std::ofstream pca_os(o->pca_csv, std::ios::binary | std::ios::trunc);
    if (!stats_os || !pca_os) throw Error(ErrorKind::kIo, "cannot open CSV output");
    WriteNbsStatsCsv(stats_os, pop);
    WritePcaCsv(pca_os, ids, pca);
  });
}

void RegisterFuseTrain(CLI::App &app) {
  struct Opts {
    std::string trials, gmm_scores, ivec_scores, quality, kind = "quality", out;
    FusionTrainConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("fuse-train", "Logistic-regression fusion training");
  cmd->add_option("--trials", o->trials, "Labeled development trials")->required();
  cmd->add_option("--gmm-scores", o->gmm_scores)->required();
  cmd->add_option("--ivec-scores", o->ivec_scores)->required();
  cmd->add_option("--quality", o->quality, "Quality sidecar (kind=quality)");
  cmd->add_option("--kind", o->kind, "linear | quality")->capture_default_str();
  cmd->add_option("--prior", o->cfg.effective_prior)->capture_default_str();
  cmd->add_option("--lambda", o->cfg.reg_lambda, "L2 penalty on alpha")
      ->capture_default_str();
  cmd->add_option("--max-iters", o->cfg.max_iters)->capture_default_str();
  cmd->add_option("--out", o->out, "Output FUS1 model")->required();
  cmd->callback([o] {
    const FusionKind kind = ParseFusionKind(o->kind);
    if (kind == FusionKind::kQuality && o->quality.empty())
      throw Error(ErrorKind::kInvalidArgument, "--kind quality requires --quality");
    const auto dev = JoinTrials(ReadTrials(fs::path(o->trials)), o->gmm_scores,
                                o->ivec_scores, o->quality);
    const FusionTrainResult result = kind == FusionKind::kQuality
                                         ? TrainQualityFusion(dev, o->cfg)
                                         : TrainLinearFusion(dev, o->cfg);
    WriteFusionModel(fs::path(o->out), result.model);
  });
}

void RegisterFuseApply(CLI::App &app) {
  struct Opts {
    std::string model, gmm_scores, ivec_scores, quality, out, decisions;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("fuse-apply", "Apply a FUS1 model to score pairs");
  cmd->add_option("--model", o->model)->required();
  cmd->add_option("--gmm-scores", o->gmm_scores, "Also defines the trial order")->required();
  cmd->add_option("--ivec-scores", o->ivec_scores)->required();
  cmd->add_option("--quality", o->quality);
  cmd->add_option("--out", o->out, "Fused score file")->required();
  cmd->add_option("--decisions", o->decisions, "Optional <enroll> <test> accept|reject");
  cmd->callback([o] {
    const FusionModel model = ReadFusionModel(fs::path(o->model));
    if (model.kind == FusionKind::kQuality && o->quality.empty())
      throw Error(ErrorKind::kInvalidArgument, "quality fusion model requires --quality");
    std::vector<Trial> pairs;
    for (const ScoredTrial &s : ReadScores(fs::path(o->gmm_scores)))
      pairs.push_back({s.enroll_id, s.test_id, false});
    const auto trials = JoinTrials(pairs, o->gmm_scores, o->ivec_scores, o->quality);
    std::vector<ScoredTrial> fused;
    std::ofstream decisions;
    if (!o->decisions.empty()) {
      decisions.open(o->decisions, std::ios::binary | std::ios::trunc);
      if (!decisions) throw Error(ErrorKind::kIo, "cannot open '" + o->decisions + "'");
    }
    for (const TrialRecord &t : trials) {
      const FusionDecision d = ApplyFusion(model, t);
      fused.push_back({t.enroll_id, t.test_id, d.score});
      if (decisions.is_open())
        decisions << t.enroll_id << ' ' << t.test_id << ' '
                  << (d.accept ? "accept" : "reject") << '\n';
    }
    WriteScores(fs::path(o->out), fused);
  });
}

void RegisterEval(CLI::App &app) {
  struct Opts {
    std::string trials, scores, det_csv;
    DetCost cost;
  };
  auto o = std::make_shared<Opts>();
  CLI::App *cmd = app.add_subcommand("eval", "EER and minimum DCF of a score file");
  cmd->add_option("--trials", o->trials, "Labeled trials")->required();
  cmd->add_option("--scores", o->scores)->required();
  cmd->add_option("--c-miss", o->cost.c_miss)->capture_default_str();
  cmd->add_option("--c-fa", o->cost.c_fa)->capture_default_str();
  cmd->add_option("--p-tar", o->cost.p_tar)->capture_default_str();
  cmd->add_option("--det-csv", o->det_csv, "Write threshold,p_miss,p_fa operating points");
  cmd->callback([o] {
    const auto scores = ScoreMap(o->scores);
    std::vector<double> tar, non;
    for (const Trial &t : ReadTrials(fs::path(o->trials))) {
      const double s = Lookup(scores, {t.enroll_id, t.test_id}, o->scores);
      (t.is_target ? tar : non).push_back(s);
    }
    const DetMetrics m = Evaluate(tar, non, o->cost);
    std::cout << "EER " << FormatReal(m.eer) << '\n'
              << "minDCF " << FormatReal(m.min_dcf) << '\n';
    if (!o->det_csv.empty()) {
      std::ofstream os(o->det_csv, std::ios::binary | std::ios::trunc);
      if (!os) throw Error(ErrorKind::kIo, "cannot open '" + o->det_csv + "'");
      os << "threshold,p_miss,p_fa\n";
      for (const OperatingPoint &p : DetCurve(tar, non))
        os << FormatDouble(p.threshold) << ',' << FormatDouble(p.p_miss) << ','
           << FormatDouble(p.p_fa) << '\n';
    }
  });
}

void RegisterReproduce(CLI::App &app, const GlobalOptions &global) {
  struct Opts {
    std::string out_dir;
    std::uint64_t seed = 1;
    ExperimentConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  ExperimentConfig &c = o->cfg;
  CLI::App *cmd = app.add_subcommand(
      "reproduce", "Run the synthetic duration experiment and write CSV reports");
  cmd->add_option("--out-dir", o->out_dir)->required();
  cmd->add_option("--seed", o->seed, "Corpus and experiment seed")->capture_default_str();
  cmd->add_option("--n-speakers", c.synth.n_speakers)->capture_default_str();
  cmd->add_option("--utts-per-speaker", c.synth.utts_per_speaker)->capture_default_str();
  cmd->add_option("--frames-per-utt", c.synth.frames_per_utt)->capture_default_str();
  cmd->add_option("--speaker-shift", c.synth.speaker_shift_scale)->capture_default_str();
  cmd->add_option("--speaker-rank", c.synth.speaker_rank)->capture_default_str();
  cmd->add_option("--noise-max", c.synth.noise_fraction_max)->capture_default_str();
  cmd->add_option("--n-background", c.n_background_speakers)->capture_default_str();
  cmd->add_option("--ubm-k", c.ubm_components)->capture_default_str();
  cmd->add_option("--tv-rank", c.tv_rank)->capture_default_str();
  cmd->add_option("--plda-rank", c.plda_rank)->capture_default_str();
  cmd->add_option("--figure-segments", c.figure_segments_per_utt)->capture_default_str();
  cmd->add_flag("--length-norm", c.length_normalize);
  cmd->callback([o, &global] {
    ExperimentConfig cfg = o->cfg;
    cfg.synth.seed = o->seed;
    cfg.seed = o->seed;
    cfg.parallel = global.parallel();
    const ExperimentResult result = RunExperiment(cfg);
    WriteExperimentOutputs(o->out_dir, result);
    WriteReportCsv(std::cout, result.rows);
  });
}

}  // namespace

void RegisterAnalysisCommands(CLI::App &app, const GlobalOptions &global) {
  RegisterQuality(app);
  RegisterNbsAnalyze(app);
  RegisterFuseTrain(app);
  RegisterFuseApply(app);
  RegisterEval(app);
  RegisterReproduce(app, global);
}

}  // namespace asvq::tools
