// tests/unit/test_bw_stats.cc

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
#include <numbers>
#include <random>
#include <vector>

#include "asvq/bw_stats.h"
#include "asvq/synth.h"
#include "doctest.h"

namespace asvq {
namespace {

Nbs MakeNbs(std::initializer_list<double> v) {
  Nbs n;
  n.values = Vector(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) n.values(i++) = x;
  return n;
}

}  // namespace

TEST_SUITE("bw-stats") {

TEST_CASE("zeroth order statistics sum to the frame count") {
  std::mt19937_64 rng(1);
  const Gmm ubm = RandomGmm(16, 4, rng);
  for (int c : {1, 7, 200, 3000}) {
    const BwStats s = AccumulateBw(ubm, SampleFrames(ubm, c, rng));
    CHECK(s.frames == c);
    CHECK(std::abs(s.n.sum() - c) <= 1e-6 * c);
    CHECK(s.n.minCoeff() >= 0.0);
    const Nbs nbs = NormalizeZeroth(s);
    CHECK(std::abs(nbs.values.sum() - 1.0) < 1e-9);
    CHECK(nbs.values.minCoeff() >= 0.0);
    CHECK(nbs.values.maxCoeff() <= 1.0);
  }
}

TEST_CASE("first order statistic is the posterior weighted mean") {
  std::mt19937_64 rng(2);
  const Gmm ubm = RandomGmm(3, 2, rng);
  const FeatureMatrix x = SampleFrames(ubm, 60, rng);
  const BwStats s = AccumulateBw(ubm, x);
  const RowMatrix post = Posteriors(ubm, x);
  for (int i = 0; i < 3; ++i) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(2);
    double n = 0;
    for (int t = 0; t < x.rows(); ++t) {
      acc += post(t, i) * x.row(t);
      n += post(t, i);
    }
    CHECK(std::abs(s.n(i) - n) < 1e-10);
    CHECK((s.e.row(i) - acc / n).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("a frame at an isolated mean goes to that component") {
  Gmm ubm;
  ubm.weights = Vector::Constant(3, 1.0 / 3);
  ubm.means = RowMatrix(3, 2);
  ubm.means << 0, 0, 40, 40, -40, 40;
  ubm.variances = RowMatrix::Ones(3, 2);
  const BwStats s = AccumulateBw(ubm, ubm.means.topRows(1));
  CHECK(std::abs(s.n(0) - 1.0) < 1e-6);
  CHECK(s.n(1) < 1e-6);
  CHECK(s.n(2) < 1e-6);
  // The far components are unobserved and keep the ubm mean.
  CHECK_FALSE(s.IsObserved(1));
  CHECK(s.e.row(1) == ubm.means.row(1));
  CHECK(s.e.row(2) == ubm.means.row(2));
}

TEST_CASE("accumulation rejects empty features") {
  std::mt19937_64 rng(3);
  const Gmm ubm = RandomGmm(2, 2, rng);
  CHECK_THROWS_AS(AccumulateBw(ubm, FeatureMatrix(0, 2)), Error);
  CHECK_THROWS_AS(AccumulateBw(ubm, FeatureMatrix::Zero(4, 3)), Error);
}

TEST_CASE("normalized statistics") {
  BwStats s;
  s.n = Vector(2);
  s.n << 3.0, 1.0;
  s.e = RowMatrix::Zero(2, 1);
  s.frames = 4;
  const Nbs nbs = NormalizeZeroth(s);
  CHECK(nbs.values(0) == 0.75);
  CHECK(nbs.values(1) == 0.25);
  s.n << 5.0, 0.0;
  s.frames = 5;
  CHECK(NormalizeZeroth(s).values(0) == 1.0);
  CHECK(NormalizeZeroth(s).values(1) == 0.0);
  s.frames = 0;
  CHECK_THROWS_AS(NormalizeZeroth(s), Error);
}

TEST_CASE("quality of the weights themselves is zero") {
  std::mt19937_64 rng(4);
  const Gmm ubm = RandomGmm(10, 2, rng);
  Nbs nbs;
  nbs.values = ubm.weights;
  CHECK(Quality(nbs, ubm) == 0.0);
}

TEST_CASE("quality of a hard assignment against a flat ubm") {
  Gmm ubm;
  ubm.weights = Vector::Constant(2, 0.5);
  ubm.means = RowMatrix::Zero(2, 1);
  ubm.variances = RowMatrix::Ones(2, 1);
  CHECK(Quality(MakeNbs({1.0, 0.0}), ubm) == 1.0);
}

TEST_CASE("quality matches an element-wise loop") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const Gmm ubm = RandomGmm(12, 1, rng);
    const Nbs nbs = NormalizeZeroth(AccumulateBw(ubm, SampleFrames(ubm, 30, rng)));
    double expected = 0;
    for (int i = 0; i < 12; ++i) expected += std::abs(nbs.values(i) - ubm.weights(i));
    const double q = Quality(nbs, ubm);
    CHECK(std::abs(q - expected) < 1e-12);
    CHECK(q >= 0.0);
    CHECK(q < 2.0);
  }
}

TEST_CASE("quality rejects a component count mismatch") {
  std::mt19937_64 rng(6);
  const Gmm ubm = RandomGmm(3, 1, rng);
  try {
    Quality(MakeNbs({0.5, 0.5}), ubm);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
  }
}

TEST_CASE("quality accepts a custom dissimilarity") {
  std::mt19937_64 rng(7);
  const Gmm ubm = RandomGmm(3, 1, rng);
  const Nbs nbs = MakeNbs({1.0, 0.0, 0.0});
  const double linf = Quality(nbs, ubm, [](const Vector &a, const Vector &b) {
    return (a - b).cwiseAbs().maxCoeff();
  });
  CHECK(linf == doctest::Approx((nbs.values - ubm.weights).cwiseAbs().maxCoeff()));
}

TEST_CASE("population of identical vectors has zero spread") {
  const std::vector<Nbs> set(5, MakeNbs({0.2, 0.3, 0.5}));
  const NbsPopulation pop = NbsPopulationStats(set, "x");
  CHECK(pop.stddev.cwiseAbs().maxCoeff() == 0.0);
  CHECK(pop.count == 5);
  CHECK(pop.label == "x");
  CHECK(std::abs(pop.mean.sum() - 1.0) < 1e-6);
  CHECK_THROWS_AS(NbsPopulationStats(std::vector<Nbs>{}), Error);
}

TEST_CASE("population std uses the unbiased estimator") {
  const std::vector<Nbs> set{MakeNbs({0.0, 1.0}), MakeNbs({1.0, 0.0})};
  const NbsPopulation pop = NbsPopulationStats(set);
  CHECK(pop.mean(0) == 0.5);
  CHECK(pop.stddev(0) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("nbs of ubm-sampled utterances centres on the weights") {
  std::mt19937_64 rng(8);
  const Gmm ubm = RandomGmm(16, 3, rng);
  std::vector<Nbs> set;
  for (int u = 0; u < 300; ++u)
    set.push_back(NormalizeZeroth(AccumulateBw(ubm, SampleFrames(ubm, 500, rng))));
  const NbsPopulation pop = NbsPopulationStats(set);
  int within = 0;
  for (int i = 0; i < 16; ++i) {
    const double se = pop.stddev(i) / std::sqrt(300.0);
    within += std::abs(pop.mean(i) - ubm.weights(i)) <= 3 * se;
  }
  CHECK(within >= 15);
}

TEST_CASE("shorter segments have more nbs spread") {
  std::mt19937_64 rng(9);
  const Gmm ubm = RandomGmm(16, 3, rng);
  std::vector<Nbs> short_set, long_set;
  for (int u = 0; u < 200; ++u) {
    short_set.push_back(NormalizeZeroth(AccumulateBw(ubm, SampleFrames(ubm, 100, rng))));
    long_set.push_back(NormalizeZeroth(AccumulateBw(ubm, SampleFrames(ubm, 2000, rng))));
  }
  const Vector s = NbsPopulationStats(short_set).stddev;
  const Vector l = NbsPopulationStats(long_set).stddev;
  int larger = 0;
  for (int i = 0; i < 16; ++i) larger += s(i) > l(i);
  CHECK(larger >= 15);
}

TEST_CASE("pca centres the points and orders the variances") {
  std::mt19937_64 rng(10);
  const Gmm ubm = RandomGmm(8, 2, rng);
  std::vector<Nbs> set;
  for (int u = 0; u < 100; ++u)
    set.push_back(NormalizeZeroth(AccumulateBw(ubm, SampleFrames(ubm, 50, rng))));
  const PcaProjection pca = PcaProject(set, 2);
  REQUIRE(pca.points.rows() == 100);
  REQUIRE(pca.points.cols() == 2);
  CHECK(std::abs(pca.points.col(0).mean()) < 1e-9);
  CHECK(std::abs(pca.points.col(1).mean()) < 1e-9);
  CHECK(pca.points.col(0).squaredNorm() >= pca.points.col(1).squaredNorm());
  CHECK(pca.eigenvalues(0) >= pca.eigenvalues(1));
  for (int c = 0; c < 2; ++c) {
    int first = 0;
    while (pca.basis(first, c) == 0.0) ++first;
    CHECK(pca.basis(first, c) > 0.0);
    CHECK(std::abs(pca.basis.col(c).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("pca recovers the axes of an anisotropic cloud") {
  const double angle = 30.0 * std::numbers::pi / 180.0;
  Vector axis1(3), axis2(3);
  axis1 << std::cos(angle), std::sin(angle), 0.0;
  axis2 << -std::sin(angle), std::cos(angle), 0.0;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Nbs> set;
  for (int u = 0; u < 20000; ++u) {
    Nbs n;
    n.values = 3.0 * normal(rng) * axis1 + 1.0 * normal(rng) * axis2;
    n.values(2) += 0.1 * normal(rng);
    set.push_back(n);
  }
  const PcaProjection pca = PcaProject(set, 2);
  const auto angle_deg = [](const Vector &a, const Vector &b) {
    return std::acos(std::min(1.0, std::abs(a.dot(b)))) * 180.0 / std::numbers::pi;
  };
  CHECK(angle_deg(pca.basis.col(0), axis1) < 1.0);
  CHECK(angle_deg(pca.basis.col(1), axis2) < 1.0);
}

TEST_CASE("pca needs two vectors") {
  CHECK_THROWS_AS(PcaProject(std::vector<Nbs>{MakeNbs({1.0, 0.0})}, 2), Error);
}

}  // TEST_SUITE

}  // namespace asvq
