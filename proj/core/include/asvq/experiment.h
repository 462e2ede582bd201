// core/include/asvq/experiment.h

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

#ifndef ASVQ_EXPERIMENT_H_
#define ASVQ_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "asvq/bw_stats.h"
#include "asvq/fusion.h"
#include "asvq/gmm.h"
#include "asvq/metrics.h"
#include "asvq/parallel.h"
#include "asvq/synth.h"

namespace asvq {

/// Desk-scale duration experiment on a synthetic corpus.
///
/// Speakers are split into a background set (UBM, total variability and
/// PLDA training) and an evaluation set.  For every table duration the
/// evaluation utterances are truncated with the skip-500 protocol and every
/// ordered pair of distinct segments becomes a trial; enrollment and test
/// share the duration.  Fusion weights are trained by two-fold
/// cross-validation over evaluation speakers (fold = enrollment speaker
/// parity) and the held-out fused scores are pooled.
///
/// For every figure duration each utterance yields several random-start
/// segments whose normalized statistics feed the population and PCA
/// summaries.
struct ExperimentConfig {
  SynthConfig synth;
  int n_background_speakers = 25;

  int ubm_components = 64;
  EmConfig em;
  int tv_rank = 24;
  int tv_iters = 10;
  int plda_rank = 12;
  int plda_iters = 10;
  int plda_segments_per_utt = 8;  // random-start segments per background utt
  bool length_normalize = false;
  double relevance = 16.0;

  std::vector<int> table_durations{200, 500, 1000};
  std::vector<int> figure_durations{200, 1000, 5000};
  int figure_segments_per_utt = 5;

  FusionTrainConfig fusion;
  DetCost cost;
  std::uint64_t seed = 1;
  Parallelism parallel;

  void Validate() const;
};

inline constexpr const char *kSystemGmmUbm = "gmm-ubm";
inline constexpr const char *kSystemIvector = "ivector-plda";
inline constexpr const char *kSystemLinearFusion = "linear-fusion";
inline constexpr const char *kSystemQualityFusion = "quality-fusion";

struct ReportRow {
  std::string condition;
  std::string system;
  DetMetrics metrics;
};

struct TableCondition {
  std::string label;
  int frames = 0;
  std::vector<TrialRecord> trials;          // base scores and qualities
  std::vector<double> linear_fused;         // held-out fused scores
  std::vector<double> quality_fused;
  FusionModel linear_model[2];              // one per fold
  FusionModel quality_model[2];
  EmTrace plda_trace;
};

struct FigureCondition {
  std::string label;
  int frames = 0;
  std::vector<std::string> ids;
  std::vector<Nbs> nbs;
  std::vector<double> quality;
  NbsPopulation population;
  PcaProjection pca;
  double mean_quality = 0;
};

/// Wall-clock seconds spent in each stage of RunExperiment.
struct ExperimentTimings {
  double ubm = 0;
  double tv = 0;      // background statistics and total variability
  double table = 0;   // all table conditions, PLDA training included
  double figures = 0;
};

struct ExperimentResult {
  Gmm ubm;
  EmTrace ubm_trace;
  EmTrace tv_trace;
  std::vector<TableCondition> table;
  std::vector<FigureCondition> figures;
  std::vector<ReportRow> rows;  // condition-major, systems in fixed order
  ExperimentTimings timings;
};

ExperimentResult RunExperiment(const ExperimentConfig &cfg);
ExperimentResult RunExperiment(const ExperimentConfig &cfg,
                               const SynthCorpus &corpus);

/// "condition,system,eer,min_dcf" with shortest round-trip numbers.
void WriteReportCsv(std::ostream &os, std::span<const ReportRow> rows);
/// "component,mean,std".
void WriteNbsStatsCsv(std::ostream &os, const NbsPopulation &population);
/// "utt_id,pc1,pc2".
void WritePcaCsv(std::ostream &os, std::span<const std::string> ids,
                 const PcaProjection &pca);
/// "condition,mean_q,std_q,count".
void WriteQualitySummaryCsv(std::ostream &os,
                            std::span<const FigureCondition> figures);

/// Writes report.csv, quality.csv and per-figure-duration
/// nbs_stats_<frames>.csv / nbs_pca_<frames>.csv into dir.
void WriteExperimentOutputs(const std::filesystem::path &dir,
                            const ExperimentResult &result);

}  // namespace asvq

#endif  // ASVQ_EXPERIMENT_H_
