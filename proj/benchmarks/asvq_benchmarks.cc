// benchmarks/asvq_benchmarks.cc

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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "asvq/bw_stats.h"
#include "asvq/fusion.h"
#include "asvq/gmm.h"
#include "asvq/ivector.h"
#include "asvq/metrics.h"
#include "asvq/plda.h"
#include "asvq/synth.h"

namespace asvq {
namespace {

// Frame posteriors against a K-component, 12-dim UBM.
void BM_Posteriors(benchmark::State &state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const Gmm ubm = RandomGmm(k, 12, rng);
  const GmmEvaluator eval(ubm);
  const FeatureMatrix x = SampleFrames(ubm, 1000, rng);
  for (auto _ : state) benchmark::DoNotOptimize(Posteriors(eval, x));
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_Posteriors)->Arg(64)->Arg(512);

void BM_AccumulateBw(benchmark::State &state) {
  std::mt19937_64 rng(2);
  const Gmm ubm = RandomGmm(64, 12, rng);
  const GmmEvaluator eval(ubm);
  const FeatureMatrix x = SampleFrames(ubm, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(AccumulateBw(eval, ubm, x));
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_AccumulateBw)->Arg(200)->Arg(1000);

// i-vector extraction with precomputed component Gram blocks.
void BM_ExtractIvector(benchmark::State &state) {
  const int rank = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const Gmm ubm = RandomGmm(64, 12, rng);
  const TvModel tv = InitTvModel(ubm, rank, 4, 0.1);
  const IvectorExtractor extractor(tv);
  const BwStats stats = AccumulateBw(ubm, SampleFrames(ubm, 500, rng));
  for (auto _ : state) benchmark::DoNotOptimize(extractor.Extract(stats));
}
BENCHMARK(BM_ExtractIvector)->Arg(24)->Arg(100);

void BM_PldaScore(benchmark::State &state) {
  const int dim = 24;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  PldaModel model;
  model.mu = Vector::Zero(dim);
  model.v = RowMatrix(dim, 12);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < 12; ++j) model.v(i, j) = normal(rng);
  model.residual_cov = RowMatrix::Identity(dim, dim);
  const PldaScorer scorer(model);
  Vector a(dim), b(dim);
  for (int i = 0; i < dim; ++i) {
    a(i) = normal(rng);
    b(i) = normal(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(scorer.Score(a, b));
}
BENCHMARK(BM_PldaScore);

void BM_ComputeEer(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> tar(n / 10), non(n - n / 10);
  for (auto &x : tar) x = 1.0 + normal(rng);
  for (auto &x : non) x = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeEer(tar, non));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ComputeEer)->Arg(10000)->Arg(100000);

void BM_TrainQualityFusion(benchmark::State &state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> q(0.0, 1.5);
  std::vector<TrialRecord> dev(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < dev.size(); ++i) {
    dev[i].is_target = i % 10 == 0;
    const double mu = dev[i].is_target ? 1.0 : 0.0;
    dev[i].scores = {mu + normal(rng), mu + normal(rng)};
    dev[i].q_enroll = q(rng);
    dev[i].q_test = q(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(TrainQualityFusion(dev));
}
BENCHMARK(BM_TrainQualityFusion)->Arg(10000);

}  // namespace
}  // namespace asvq

BENCHMARK_MAIN();
