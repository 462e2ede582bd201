// tests/unit/test_ivector.cc

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

#include <cmath>
#include <random>
#include <vector>

#include "asvq/ivector.h"
#include "asvq/synth.h"
#include "doctest.h"
#include "oracles.h"

namespace asvq {
namespace {

TvModel RandomTv(int k, int d, int r, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> var(0.5, 2.0);
  TvModel tv;
  tv.num_components = k;
  tv.dim = d;
  tv.m_bar = oracle::GaussianMatrix(k * d, 1, rng).col(0);
  tv.phi = oracle::GaussianMatrix(k * d, r, rng);
  tv.sigma = Vector(k * d);
  for (int i = 0; i < k * d; ++i) tv.sigma(i) = var(rng);
  return tv;
}

BwStats RandomStats(int k, int d, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> occ(0.0, 30.0);
  BwStats s;
  s.n = Vector(k);
  for (int i = 0; i < k; ++i) s.n(i) = occ(rng);
  s.e = oracle::GaussianMatrix(k, d, rng, 2.0);
  s.frames = static_cast<std::int64_t>(std::ceil(s.n.sum()));
  return s;
}

// Stats of an utterance whose supervector is m_bar + phi y with frames
// spread over components by the weights.
BwStats GeneratedStats(const Gmm &ubm, const RowMatrix &phi, int frames,
                       std::mt19937_64 &rng) {
  const int k = ubm.NumComponents(), d = ubm.Dim();
  const Vector y = oracle::GaussianMatrix(static_cast<int>(phi.cols()), 1, rng).col(0);
  const Vector shift = phi * y;
  std::normal_distribution<double> normal(0.0, 1.0);
  BwStats s;
  s.n = ubm.weights * frames;
  s.e = RowMatrix(k, d);
  s.frames = frames;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j)
      s.e(i, j) = ubm.means(i, j) + shift(i * d + j) +
                  normal(rng) * std::sqrt(ubm.variances(i, j) / s.n(i));
  return s;
}

}  // namespace

TEST_SUITE("ivector") {

TEST_CASE("extraction matches a dense solve on random instances") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    std::uniform_int_distribution<int> kk(1, 8), dd(1, 4), rr(1, 3);
    const int k = kk(rng), d = dd(rng);
    const int r = std::min(rr(rng), k * d);
    const TvModel tv = RandomTv(k, d, r, rng);
    const BwStats s = RandomStats(k, d, rng);
    const IVector iv = ExtractIvector(tv, s, "u");
    const Vector expected = oracle::DenseIvector(tv.m_bar, tv.phi, tv.sigma, s.n, s.e);
    CHECK(iv.source_utt == "u");
    CHECK((iv.y - expected).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("k4 d3 r2 case matches the dense solve") {
  std::mt19937_64 rng(2);
  const TvModel tv = RandomTv(4, 3, 2, rng);
  const BwStats s = RandomStats(4, 3, rng);
  const IvectorExtractor ex(tv);
  const Vector expected = oracle::DenseIvector(tv.m_bar, tv.phi, tv.sigma, s.n, s.e);
  CHECK((ex.Extract(s).y - expected).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((ex.Posterior(s).mean - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("zero loadings give a zero i-vector") {
  std::mt19937_64 rng(3);
  TvModel tv = RandomTv(4, 3, 2, rng);
  tv.phi.setZero();
  CHECK(ExtractIvector(tv, RandomStats(4, 3, rng)).y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("centred statistics at the mean give a zero i-vector") {
  std::mt19937_64 rng(4);
  const TvModel tv = RandomTv(5, 2, 3, rng);
  BwStats s = RandomStats(5, 2, rng);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 2; ++j) s.e(i, j) = tv.m_bar(i * 2 + j);
  CHECK(ExtractIvector(tv, s).y.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("large occupancy removes the prior") {
  std::mt19937_64 rng(5);
  const TvModel tv = RandomTv(6, 3, 3, rng);
  BwStats s = RandomStats(6, 3, rng);
  s.n.array() += 1.0;
  s.n *= 1e6;
  s.frames = static_cast<std::int64_t>(s.n.sum());
  // Weighted least squares in the Sigma^-1 N metric.
  Vector w(18), centred(18);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) {
      w(i * 3 + j) = s.n(i) / tv.sigma(i * 3 + j);
      centred(i * 3 + j) = s.e(i, j) - tv.m_bar(i * 3 + j);
    }
  const Eigen::MatrixXd gram = tv.phi.transpose() * w.asDiagonal() * tv.phi;
  const Vector ls = gram.ldlt().solve(tv.phi.transpose() * w.asDiagonal() * centred);
  const Vector y = ExtractIvector(tv, s).y;
  CHECK((y - ls).cwiseAbs().maxCoeff() < 1e-4 * std::max(1.0, ls.cwiseAbs().maxCoeff()));
}

TEST_CASE("extraction rejects mismatched statistics") {
  std::mt19937_64 rng(6);
  const TvModel tv = RandomTv(4, 3, 2, rng);
  try {
    ExtractIvector(tv, RandomStats(4, 2, rng));
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
  }
}

TEST_CASE("tv training recovers a generator subspace") {
  std::mt19937_64 rng(7);
  const Gmm ubm = RandomGmm(8, 5, rng);
  const RowMatrix phi_true = oracle::GaussianMatrix(40, 2, rng);
  std::vector<BwStats> stats;
  for (int u = 0; u < 500; ++u) stats.push_back(GeneratedStats(ubm, phi_true, 200, rng));
  TvConfig cfg;
  cfg.rank = 2;
  cfg.n_iters = 20;
  cfg.seed = 3;
  EmTrace trace;
  const TvModel tv = TrainTv(ubm, stats, cfg, &trace);
  CHECK(oracle::MaxPrincipalAngleDeg(tv.phi, phi_true) < 5.0);
  REQUIRE(trace.objective.size() == 21);
  for (std::size_t k = 1; k < trace.objective.size(); ++k)
    CHECK(trace.objective[k] >= trace.objective[k - 1] - 1e-8 * std::abs(trace.objective[k - 1]));
}

TEST_CASE("tv training is bit-identical across thread counts") {
  std::mt19937_64 rng(8);
  const Gmm ubm = RandomGmm(4, 3, rng);
  const RowMatrix phi_true = oracle::GaussianMatrix(12, 2, rng);
  std::vector<BwStats> stats;
  for (int u = 0; u < 60; ++u) stats.push_back(GeneratedStats(ubm, phi_true, 100, rng));
  TvConfig cfg;
  cfg.rank = 2;
  cfg.n_iters = 4;
  cfg.seed = 9;
  cfg.parallel = Parallelism{1, true};
  const TvModel a = TrainTv(ubm, stats, cfg);
  const TvModel b = TrainTv(ubm, stats, cfg);
  cfg.parallel = Parallelism{3, true};
  const TvModel c = TrainTv(ubm, stats, cfg);
  CHECK(a.phi == b.phi);
  CHECK(a.phi == c.phi);
}

TEST_CASE("tv training rejects bad input") {
  std::mt19937_64 rng(9);
  const Gmm ubm = RandomGmm(2, 2, rng);
  TvConfig cfg;
  cfg.rank = 2;
  CHECK_THROWS_AS(TrainTv(ubm, std::vector<BwStats>{}, cfg), Error);
  const std::vector<BwStats> one{AccumulateBw(ubm, SampleFrames(ubm, 10, rng))};
  cfg.rank = 5;
  CHECK_THROWS_AS(TrainTv(ubm, one, cfg), Error);
}

TEST_CASE("length normalization") {
  IVector iv;
  iv.y = Vector(3);
  iv.y << 3.0, 0.0, 4.0;
  iv.source_utt = "a";
  const IVector n = LengthNormalize(iv);
  CHECK(n.y.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(n.y(0) == doctest::Approx(0.6));
  CHECK(n.source_utt == "a");
  iv.y.setZero();
  CHECK(LengthNormalize(iv).y.norm() == 0.0);
}

}  // TEST_SUITE

}  // namespace asvq
