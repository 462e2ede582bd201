// tests/unit/test_experiment.cc

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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "asvq/experiment.h"
#include "doctest.h"

namespace asvq {
namespace {

ExperimentConfig TinyConfig() {
  ExperimentConfig cfg;
  cfg.synth.n_speakers = 8;
  cfg.synth.utts_per_speaker = 3;
  cfg.synth.frames_per_utt = 1200;
  cfg.synth.num_components = 8;
  cfg.synth.dim = 4;
  cfg.synth.speaker_rank = 6;
  cfg.n_background_speakers = 4;
  cfg.ubm_components = 8;
  cfg.em.n_iters = 5;
  cfg.tv_rank = 4;
  cfg.tv_iters = 3;
  cfg.plda_rank = 2;
  cfg.plda_iters = 3;
  cfg.plda_segments_per_utt = 2;
  cfg.table_durations = {200, 500};
  cfg.figure_durations = {200, 1000};
  cfg.figure_segments_per_utt = 2;
  return cfg;
}

std::string FirstLine(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("report has one row per condition and system") {
  const ExperimentResult r = RunExperiment(TinyConfig());
  REQUIRE(r.rows.size() == 8);
  const char *systems[] = {kSystemGmmUbm, kSystemIvector, kSystemLinearFusion,
                           kSystemQualityFusion};
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].condition == (i < 4 ? "200" : "500"));
    CHECK(r.rows[i].system == systems[i % 4]);
    CHECK(r.rows[i].metrics.eer >= 0.0);
    CHECK(r.rows[i].metrics.eer <= 1.0);
    CHECK(r.rows[i].metrics.min_dcf >= 0.0);
  }
  REQUIRE(r.table.size() == 2);
  // 4 evaluation speakers x 3 utterances, every ordered pair of distinct segments.
  CHECK(r.table[0].trials.size() == 12 * 11);
  CHECK(r.table[0].linear_fused.size() == r.table[0].trials.size());
  for (const auto &t : r.table[0].trials) {
    CHECK(t.q_enroll.has_value());
    CHECK(t.q_test.has_value());
  }
  REQUIRE(r.figures.size() == 2);
  CHECK(r.figures[0].nbs.size() == 24 * 2);
  CHECK(r.figures[0].pca.points.rows() == 48);

  std::ostringstream csv;
  WriteReportCsv(csv, r.rows);
  CHECK(csv.str().rfind("condition,system,eer,min_dcf\n", 0) == 0);

  const auto dir = std::filesystem::temp_directory_path() / "asvq_experiment_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  WriteExperimentOutputs(dir, r);
  CHECK(FirstLine(dir / "report.csv") == "condition,system,eer,min_dcf");
  CHECK(FirstLine(dir / "quality.csv") == "condition,mean_q,std_q,count");
  CHECK(FirstLine(dir / "nbs_stats_200.csv") == "component,mean,std");
  CHECK(FirstLine(dir / "nbs_pca_1000.csv") == "utt_id,pc1,pc2");
  std::filesystem::remove_all(dir);
}

TEST_CASE("same seed gives the same report") {
  ExperimentConfig cfg = TinyConfig();
  cfg.table_durations = {200};
  cfg.figure_durations = {200};
  std::ostringstream a, b;
  WriteReportCsv(a, RunExperiment(cfg).rows);
  cfg.parallel.threads = 3;
  WriteReportCsv(b, RunExperiment(cfg).rows);
  CHECK(a.str() == b.str());
}

TEST_CASE("invalid experiment configs are rejected") {
  ExperimentConfig cfg = TinyConfig();
  cfg.n_background_speakers = 8;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = TinyConfig();
  cfg.plda_rank = 5;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = TinyConfig();
  cfg.table_durations = {800};
  CHECK_THROWS_AS(RunExperiment(cfg), Error);
}

}  // TEST_SUITE

}  // namespace asvq
