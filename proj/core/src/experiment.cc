// core/src/experiment.cc

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

#include "asvq/experiment.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "asvq/io.h"
#include "asvq/ivector.h"
#include "asvq/plda.h"

namespace asvq {

void ExperimentConfig::Validate() const {
  synth.Validate();
  auto fail = [](const std::string &msg) {
    throw Error(ErrorKind::kInvalidArgument, "experiment: " + msg);
  };
  const int n_eval = synth.n_speakers - n_background_speakers;
  if (n_background_speakers < 2) fail("need at least 2 background speakers");
  if (n_eval < 4) fail("need at least 4 evaluation speakers");
  if (synth.utts_per_speaker < 2) fail("need at least 2 utterances per speaker");
  if (ubm_components < 1) fail("ubm_components must be >= 1");
  if (tv_rank < 1 || tv_rank > ubm_components * synth.dim)
    fail("tv_rank must lie in [1, K*d]");
  if (plda_rank < 1 || plda_rank > tv_rank) fail("plda_rank must lie in [1, tv_rank]");
  if (tv_iters < 1 || plda_iters < 1) fail("iteration counts must be >= 1");
  if (plda_segments_per_utt < 1 || figure_segments_per_utt < 1)
    fail("segment counts must be >= 1");
  if (relevance <= 0) fail("relevance must be positive");
  if (table_durations.empty() || figure_durations.empty()) fail("empty duration list");
  for (int d : table_durations)
    if (d < 1 || d + kEvalSkipFrames > synth.frames_per_utt)
      fail("table duration " + std::to_string(d) + " does not fit the utterance length");
  for (int d : figure_durations)
    if (d < 1 || d > synth.frames_per_utt)
      fail("figure duration " + std::to_string(d) + " exceeds the utterance length");
}

namespace {

struct SegmentSet {
  std::vector<std::string> ids;
  std::vector<std::string> speakers;
  std::vector<FeatureMatrix> features;
};

// copies == 1 keeps utterance ids; otherwise ids get an "_s<k>" suffix.
SegmentSet MakeSegments(std::span<const Utterance> utts, int frames,
                        TruncationMode mode, std::uint64_t seed, int copies) {
  SegmentSet set;
  const int durations[] = {frames};
  for (int k = 0; k < copies; ++k) {
    std::vector<DurationCondition> cond = MakeDurationConditions(
        utts, durations, mode, DeriveSeed(seed, static_cast<std::uint64_t>(k)));
    for (Utterance &u : cond.front().utterances) {
      set.ids.push_back(copies == 1 ? u.id : u.id + "_s" + std::to_string(k));
      set.speakers.push_back(u.speaker);
      set.features.push_back(std::move(u.features));
    }
  }
  return set;
}

std::vector<BwStats> ComputeStats(const GmmEvaluator &eval, const Gmm &ubm,
                                  const std::vector<FeatureMatrix> &features,
                                  const Parallelism &par) {
  std::vector<BwStats> stats(features.size());
  ParallelFor(features.size(), par,
              [&](std::size_t i) { stats[i] = AccumulateBw(eval, ubm, features[i]); });
  return stats;
}

std::vector<IVector> ExtractAll(const IvectorExtractor &extractor,
                                const std::vector<BwStats> &stats,
                                const std::vector<std::string> &ids,
                                bool length_normalize, const Parallelism &par) {
  std::vector<IVector> out(stats.size());
  ParallelFor(stats.size(), par, [&](std::size_t i) {
    out[i] = extractor.Extract(stats[i], ids[i]);
    if (length_normalize) out[i] = LengthNormalize(out[i]);
  });
  return out;
}

// Frame-averaged log-likelihood of each segment under a model, evaluated on
// the row-stacked segments in one pass.
Vector SegmentAverageLogLikes(const GmmEvaluator &eval, const FeatureMatrix &stacked,
                              std::span<const Eigen::Index> offsets) {
  const RowMatrix ll = eval.WeightedLogLikes(stacked);
  const std::size_t k = static_cast<std::size_t>(ll.cols());
  Vector out(static_cast<Eigen::Index>(offsets.size() - 1));
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    double sum = 0.0;
    for (Eigen::Index t = offsets[s]; t < offsets[s + 1]; ++t)
      sum += LogSumExp(ll.row(t).data(), k);
    out(static_cast<Eigen::Index>(s)) =
        sum / static_cast<double>(offsets[s + 1] - offsets[s]);
  }
  return out;
}

// scores(i, j): target model adapted on segment i, tested on segment j.
RowMatrix GmmUbmScoreMatrix(const Gmm &ubm, const GmmEvaluator &ubm_eval,
                            const std::vector<BwStats> &stats,
                            const std::vector<FeatureMatrix> &features,
                            double relevance, const Parallelism &par) {
  std::vector<Eigen::Index> offsets{0};
  for (const FeatureMatrix &f : features) offsets.push_back(offsets.back() + f.rows());
  FeatureMatrix stacked(offsets.back(), ubm.Dim());
  for (std::size_t s = 0; s < features.size(); ++s)
    stacked.middleRows(offsets[s], features[s].rows()) = features[s];

  const Vector ubm_ll = SegmentAverageLogLikes(ubm_eval, stacked, offsets);
  const Eigen::Index n = static_cast<Eigen::Index>(features.size());
  RowMatrix scores(n, n);
  ParallelFor(features.size(), par, [&](std::size_t i) {
    const GmmEvaluator target(MapAdaptMeans(ubm, stats[i], relevance));
    scores.row(static_cast<Eigen::Index>(i)) =
        (SegmentAverageLogLikes(target, stacked, offsets) - ubm_ll).transpose();
  });
  return scores;
}

void FuseCrossValidated(const ExperimentConfig &cfg,
                        const std::vector<int> &enroll_fold, TableCondition *cond) {
  const std::size_t n = cond->trials.size();
  cond->linear_fused.assign(n, 0.0);
  cond->quality_fused.assign(n, 0.0);
  for (int fold = 0; fold < 2; ++fold) {
    std::vector<TrialRecord> dev;
    for (std::size_t t = 0; t < n; ++t)
      if (enroll_fold[t] != fold) dev.push_back(cond->trials[t]);
    const FusionModel linear = TrainLinearFusion(dev, cfg.fusion).model;
    const FusionModel quality = TrainQualityFusion(dev, cfg.fusion).model;
    cond->linear_model[fold] = linear;
    cond->quality_model[fold] = quality;
    for (std::size_t t = 0; t < n; ++t) {
      if (enroll_fold[t] != fold) continue;
      cond->linear_fused[t] = ApplyFusion(linear, cond->trials[t]).score;
      cond->quality_fused[t] = ApplyFusion(quality, cond->trials[t]).score;
    }
  }
}

DetMetrics EvaluateScores(const std::vector<TrialRecord> &trials,
                          const std::vector<double> &scores, const DetCost &cost) {
  std::vector<bool> labels;
  labels.reserve(trials.size());
  for (const TrialRecord &t : trials) labels.push_back(t.is_target);
  std::vector<double> tar, non;
  SplitByLabel(scores, labels, &tar, &non);
  return Evaluate(tar, non, cost);
}

TableCondition RunTableCondition(const ExperimentConfig &cfg, int frames,
                                 std::span<const Utterance> background,
                                 std::span<const Utterance> evaluation,
                                 const Gmm &ubm, const GmmEvaluator &ubm_eval,
                                 const IvectorExtractor &extractor) {
  const Parallelism &par = cfg.parallel;
  const std::uint64_t seed = DeriveSeed(cfg.seed, 100 + static_cast<std::uint64_t>(frames));
  TableCondition cond;
  cond.frames = frames;
  cond.label = std::to_string(frames);

  // PLDA on background segments of the matched duration.
  const SegmentSet train = MakeSegments(background, frames, TruncationMode::kRandomStart,
                                        DeriveSeed(seed, 1), cfg.plda_segments_per_utt);
  const std::vector<IVector> train_iv =
      ExtractAll(extractor, ComputeStats(ubm_eval, ubm, train.features, par), train.ids,
                 cfg.length_normalize, par);
  PldaConfig plda_cfg;
  plda_cfg.rank = cfg.plda_rank;
  plda_cfg.n_iters = cfg.plda_iters;
  const PldaModel plda = TrainPlda(train_iv, train.speakers, plda_cfg, &cond.plda_trace);
  const PldaScorer scorer(plda);

  const SegmentSet test = MakeSegments(evaluation, frames, TruncationMode::kEvalSkip500,
                                       DeriveSeed(seed, 2), 1);
  const std::vector<BwStats> stats = ComputeStats(ubm_eval, ubm, test.features, par);
  const std::vector<IVector> iv =
      ExtractAll(extractor, stats, test.ids, cfg.length_normalize, par);
  std::vector<double> quality(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i)
    quality[i] = Quality(NormalizeZeroth(stats[i]), ubm);

  const RowMatrix gmm_scores =
      GmmUbmScoreMatrix(ubm, ubm_eval, stats, test.features, cfg.relevance, par);

  std::map<std::string, int> speaker_index;
  for (const std::string &s : test.speakers)
    speaker_index.emplace(s, static_cast<int>(speaker_index.size()));
  std::vector<int> enroll_fold;
  const std::size_t n = test.ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      TrialRecord t;
      t.enroll_id = test.ids[i];
      t.test_id = test.ids[j];
      t.is_target = test.speakers[i] == test.speakers[j];
      t.scores = {gmm_scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                  scorer.Score(iv[i], iv[j])};
      t.q_enroll = quality[i];
      t.q_test = quality[j];
      cond.trials.push_back(std::move(t));
      enroll_fold.push_back(speaker_index.at(test.speakers[i]) % 2);
    }
  }
  FuseCrossValidated(cfg, enroll_fold, &cond);
  return cond;
}

FigureCondition RunFigureCondition(const ExperimentConfig &cfg, int frames,
                                   std::span<const Utterance> utterances,
                                   const Gmm &ubm, const GmmEvaluator &ubm_eval) {
  FigureCondition fig;
  fig.frames = frames;
  fig.label = std::to_string(frames);
  SegmentSet segs = MakeSegments(
      utterances, frames, TruncationMode::kRandomStart,
      DeriveSeed(cfg.seed, 200 + static_cast<std::uint64_t>(frames)),
      cfg.figure_segments_per_utt);
  const std::vector<BwStats> stats = ComputeStats(ubm_eval, ubm, segs.features, cfg.parallel);
  fig.ids = std::move(segs.ids);
  for (const BwStats &s : stats) {
    fig.nbs.push_back(NormalizeZeroth(s));
    fig.quality.push_back(Quality(fig.nbs.back(), ubm));
  }
  fig.population = NbsPopulationStats(fig.nbs, fig.label);
  fig.pca = PcaProject(fig.nbs, 2);
  double sum = 0.0;
  for (double q : fig.quality) sum += q;
  fig.mean_quality = sum / static_cast<double>(fig.quality.size());
  return fig;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig &cfg) {
  cfg.Validate();
  return RunExperiment(cfg, SynthCorpusFromConfig(cfg.synth, cfg.parallel));
}

ExperimentResult RunExperiment(const ExperimentConfig &cfg, const SynthCorpus &corpus) {
  cfg.Validate();
  const std::size_t n_bg_utts = static_cast<std::size_t>(cfg.n_background_speakers) *
                                static_cast<std::size_t>(cfg.synth.utts_per_speaker);
  if (corpus.utterances.size() <= n_bg_utts)
    throw Error(ErrorKind::kInsufficientData, "experiment: corpus smaller than background set");
  const std::span<const Utterance> all(corpus.utterances);
  const std::span<const Utterance> background = all.first(n_bg_utts);
  const std::span<const Utterance> evaluation = all.subspan(n_bg_utts);

  ExperimentResult result;
  std::vector<FeatureMatrix> bg_features;
  for (const Utterance &u : background) bg_features.push_back(u.features);

  using Clock = std::chrono::steady_clock;
  const auto seconds_since = [](Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };
  Clock::time_point stage = Clock::now();
  EmConfig em = cfg.em;
  em.seed = DeriveSeed(cfg.seed, 10);
  em.parallel = cfg.parallel;
  result.ubm = TrainUbm(bg_features, cfg.ubm_components, em, &result.ubm_trace);
  const GmmEvaluator ubm_eval(result.ubm);
  result.timings.ubm = seconds_since(stage);
  stage = Clock::now();

  TvConfig tv_cfg;
  tv_cfg.rank = cfg.tv_rank;
  tv_cfg.n_iters = cfg.tv_iters;
  tv_cfg.seed = DeriveSeed(cfg.seed, 11);
  tv_cfg.parallel = cfg.parallel;
  const std::vector<BwStats> bg_stats =
      ComputeStats(ubm_eval, result.ubm, bg_features, cfg.parallel);
  const TvModel tv = TrainTv(result.ubm, bg_stats, tv_cfg, &result.tv_trace);
  const IvectorExtractor extractor(tv);
  result.timings.tv = seconds_since(stage);
  stage = Clock::now();

  for (int frames : cfg.table_durations) {
    result.table.push_back(RunTableCondition(cfg, frames, background, evaluation,
                                             result.ubm, ubm_eval, extractor));
    const TableCondition &cond = result.table.back();
    std::vector<double> gmm, ivec;
    for (const TrialRecord &t : cond.trials) {
      gmm.push_back(t.scores[0]);
      ivec.push_back(t.scores[1]);
    }
    result.rows.push_back({cond.label, kSystemGmmUbm, EvaluateScores(cond.trials, gmm, cfg.cost)});
    result.rows.push_back({cond.label, kSystemIvector, EvaluateScores(cond.trials, ivec, cfg.cost)});
    result.rows.push_back({cond.label, kSystemLinearFusion,
                           EvaluateScores(cond.trials, cond.linear_fused, cfg.cost)});
    result.rows.push_back({cond.label, kSystemQualityFusion,
                           EvaluateScores(cond.trials, cond.quality_fused, cfg.cost)});
  }

  result.timings.table = seconds_since(stage);
  stage = Clock::now();

  for (int frames : cfg.figure_durations)
    result.figures.push_back(RunFigureCondition(cfg, frames, all, result.ubm, ubm_eval));
  result.timings.figures = seconds_since(stage);
  return result;
}

void WriteReportCsv(std::ostream &os, std::span<const ReportRow> rows) {
  os << "condition,system,eer,min_dcf\n";
  for (const ReportRow &r : rows)
    os << r.condition << ',' << r.system << ',' << FormatDouble(r.metrics.eer) << ','
       << FormatDouble(r.metrics.min_dcf) << '\n';
}

void WriteNbsStatsCsv(std::ostream &os, const NbsPopulation &population) {
  os << "component,mean,std\n";
  for (Eigen::Index i = 0; i < population.mean.size(); ++i)
    os << i << ',' << FormatDouble(population.mean(i)) << ','
       << FormatDouble(population.stddev(i)) << '\n';
}

void WritePcaCsv(std::ostream &os, std::span<const std::string> ids,
                 const PcaProjection &pca) {
  if (static_cast<Eigen::Index>(ids.size()) != pca.points.rows())
    throw Error(ErrorKind::kDimensionMismatch, "pca: id count differs from point count");
  os << "utt_id,pc1,pc2\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    os << ids[i] << ',' << FormatDouble(pca.points(r, 0)) << ','
       << FormatDouble(pca.points.cols() > 1 ? pca.points(r, 1) : 0.0) << '\n';
  }
}

void WriteQualitySummaryCsv(std::ostream &os, std::span<const FigureCondition> figures) {
  os << "condition,mean_q,std_q,count\n";
  for (const FigureCondition &f : figures) {
    double var = 0.0;
    for (double q : f.quality) var += (q - f.mean_quality) * (q - f.mean_quality);
    const std::size_t n = f.quality.size();
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    os << f.label << ',' << FormatDouble(f.mean_quality) << ',' << FormatDouble(sd) << ','
       << n << '\n';
  }
}

namespace {

template <class Fn>
void WriteCsvFile(const std::filesystem::path &path, Fn &&fn) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  fn(os);
  os.close();
  if (!os) throw Error(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

}  // namespace

void WriteExperimentOutputs(const std::filesystem::path &dir, const ExperimentResult &result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  WriteCsvFile(dir / "report.csv", [&](std::ostream &os) { WriteReportCsv(os, result.rows); });
  WriteCsvFile(dir / "quality.csv",
               [&](std::ostream &os) { WriteQualitySummaryCsv(os, result.figures); });
  for (const FigureCondition &f : result.figures) {
    WriteCsvFile(dir / ("nbs_stats_" + f.label + ".csv"),
                 [&](std::ostream &os) { WriteNbsStatsCsv(os, f.population); });
    WriteCsvFile(dir / ("nbs_pca_" + f.label + ".csv"),
                 [&](std::ostream &os) { WritePcaCsv(os, f.ids, f.pca); });
  }
}

}  // namespace asvq
