// tests/unit/test_fusion_eval.cc

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
#include <limits>
#include <random>
#include <vector>

#include "asvq/common.h"
#include "asvq/fusion.h"
#include "asvq/metrics.h"
#include "doctest.h"
#include "oracles.h"

namespace asvq {
namespace {

// Two correlated base systems with qualities in [0, 1.5).  When noisy is
// set, nontarget scores drift upward with the quality product.
std::vector<TrialRecord> MakeDev(int n, std::mt19937_64 &rng, bool noisy = false) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> q(0.0, 1.5);
  std::vector<TrialRecord> dev;
  for (int i = 0; i < n; ++i) {
    TrialRecord t;
    t.is_target = i % 4 == 0;
    t.q_enroll = q(rng);
    t.q_test = q(rng);
    const double qq = *t.q_enroll * *t.q_test;
    const double shared = normal(rng);
    const double base = t.is_target ? 1.5 : (noisy ? 1.5 * qq - 1.0 : 0.0);
    t.scores = {base + shared + 0.5 * normal(rng),
                2.0 * base + shared + normal(rng)};
    t.enroll_id = "e" + std::to_string(i);
    t.test_id = "t" + std::to_string(i);
    dev.push_back(t);
  }
  return dev;
}

double NaiveCost(const FusionModel &m, const std::vector<TrialRecord> &dev,
                 double prior, double lambda) {
  const double lo = std::log(prior / (1 - prior));
  double tar = 0, non = 0;
  int n_tar = 0, n_non = 0;
  for (const auto &t : dev) {
    double f = m.theta + m.alpha[0] * t.scores[0] + m.alpha[1] * t.scores[1];
    if (m.kind == FusionKind::kQuality) f += m.beta * *t.q_enroll * *t.q_test;
    if (t.is_target) {
      tar += std::log1p(std::exp(-(f + lo)));
      ++n_tar;
    } else {
      non += std::log1p(std::exp(f + lo));
      ++n_non;
    }
  }
  return prior * tar / n_tar + (1 - prior) * non / n_non +
         lambda * (m.alpha[0] * m.alpha[0] + m.alpha[1] * m.alpha[1]);
}

std::vector<double> Uniform(int n, std::mt19937_64 &rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(n);
  for (auto &x : out) x = u(rng);
  return out;
}

}  // namespace

TEST_SUITE("fusion-eval") {

TEST_CASE("fusion cost matches a direct evaluation") {
  std::mt19937_64 rng(1);
  const auto dev = MakeDev(200, rng);
  FusionTrainConfig cfg;
  cfg.effective_prior = 0.3;
  cfg.reg_lambda = 0.01;
  FusionModel m;
  m.alpha = {0.7, -0.2};
  m.theta = 0.4;
  m.beta = 1.1;
  CHECK(std::abs(FusionCost(m, dev, cfg) - NaiveCost(m, dev, 0.3, 0.01)) < 1e-12);
  m.kind = FusionKind::kQuality;
  CHECK(std::abs(FusionCost(m, dev, cfg) - NaiveCost(m, dev, 0.3, 0.01)) < 1e-12);
}

TEST_CASE("separable dev set trains to a tiny cost") {
  std::vector<TrialRecord> dev;
  for (int i = 0; i < 40; ++i) {
    TrialRecord t;
    t.is_target = i % 2 == 0;
    t.scores = {t.is_target ? 2.0 + 0.01 * i : -2.0 - 0.01 * i, 0.0};
    dev.push_back(t);
  }
  const FusionTrainConfig cfg;
  const double initial = FusionCost(FusionModel{}, dev, cfg);
  const FusionTrainResult r = TrainLinearFusion(dev, cfg);
  CHECK(r.cost < 0.01 * initial);
  CHECK(r.model.beta == 0.0);
  CHECK(r.model.kind == FusionKind::kLinear);
}

TEST_CASE("optimum is no worse than the prior log-odds point") {
  std::mt19937_64 rng(2);
  const auto dev = MakeDev(300, rng);
  for (double prior : {0.1, 0.5, 0.9}) {
    FusionTrainConfig cfg;
    cfg.effective_prior = prior;
    FusionModel flat;
    const FusionTrainResult r = TrainLinearFusion(dev, cfg);
    CHECK(r.cost <= FusionCost(flat, dev, cfg));
    flat.theta = std::log(prior / (1 - prior));
    CHECK(r.cost <= FusionCost(flat, dev, cfg));
    CHECK(std::abs(r.cost - FusionCost(r.model, dev, cfg)) < 1e-12);
    CHECK(r.model.prior == prior);
  }
}

TEST_CASE("training is deterministic and invariant to duplication") {
  std::mt19937_64 rng(3);
  const auto dev = MakeDev(150, rng);
  const FusionTrainResult a = TrainQualityFusion(dev);
  const FusionTrainResult b = TrainQualityFusion(dev);
  CHECK(a.model.alpha == b.model.alpha);
  CHECK(a.model.theta == b.model.theta);
  CHECK(a.model.beta == b.model.beta);
  std::vector<TrialRecord> twice(dev);
  twice.insert(twice.end(), dev.begin(), dev.end());
  const FusionTrainResult c = TrainQualityFusion(twice);
  CHECK(std::abs(c.model.alpha[0] - a.model.alpha[0]) < 1e-8);
  CHECK(std::abs(c.model.alpha[1] - a.model.alpha[1]) < 1e-8);
  CHECK(std::abs(c.model.theta - a.model.theta) < 1e-8);
  CHECK(std::abs(c.model.beta - a.model.beta) < 1e-8);
}

TEST_CASE("constant quality adds nothing over linear fusion") {
  std::mt19937_64 rng(4);
  auto dev = MakeDev(200, rng);
  for (auto &t : dev) t.q_enroll = t.q_test = 0.7;
  const double lin = TrainLinearFusion(dev).cost;
  const double qual = TrainQualityFusion(dev).cost;
  CHECK(std::abs(lin - qual) < 1e-6);
}

TEST_CASE("model nesting on random dev sets") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto dev = MakeDev(120, rng, rep % 2 == 1);
    FusionTrainConfig cfg;
    cfg.reg_lambda = rep % 3 == 0 ? 0.0 : 1e-3;
    const double qual = TrainQualityFusion(dev, cfg).cost;
    const double lin = TrainLinearFusion(dev, cfg).cost;
    const double single = std::min(TrainSingleSystemCalibration(dev, 0, cfg).cost,
                                   TrainSingleSystemCalibration(dev, 1, cfg).cost);
    CHECK(qual <= lin + 1e-6);
    CHECK(lin <= single + 1e-6);
  }
}

TEST_CASE("quality helps when reliability degrades with quality") {
  std::mt19937_64 rng(6);
  const auto dev = MakeDev(2000, rng, true);
  const FusionTrainResult lin = TrainLinearFusion(dev);
  const FusionTrainResult qual = TrainQualityFusion(dev);
  CHECK(qual.cost < lin.cost - 1e-3);
  CHECK(qual.model.beta < 0.0);
}

TEST_CASE("single calibration leaves the other weight at zero") {
  std::mt19937_64 rng(7);
  const auto dev = MakeDev(100, rng);
  const FusionTrainResult r = TrainSingleSystemCalibration(dev, 1);
  CHECK(r.model.alpha[0] == 0.0);
  CHECK(r.model.alpha[1] > 0.0);
  CHECK_THROWS_AS(TrainSingleSystemCalibration(dev, 2), Error);
}

TEST_CASE("training errors") {
  std::mt19937_64 rng(8);
  auto dev = MakeDev(40, rng);
  std::vector<TrialRecord> targets;
  for (const auto &t : dev)
    if (t.is_target) targets.push_back(t);
  try {
    TrainLinearFusion(targets);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kInsufficientData);
  }
  dev[3].q_test.reset();
  CHECK_NOTHROW(TrainLinearFusion(dev));
  CHECK_THROWS_AS(TrainQualityFusion(dev), Error);
  FusionTrainConfig bad;
  bad.effective_prior = 1.0;
  CHECK_THROWS_AS(TrainLinearFusion(MakeDev(40, rng), bad), Error);
}

TEST_CASE("apply fusion arithmetic") {
  TrialRecord t;
  t.scores = {1.0, 1.0};
  t.q_enroll = 0.5;
  t.q_test = 0.5;
  FusionModel m;
  m.alpha = {0.5, 0.5};
  m.theta = -1.0;
  m.beta = 2.0;
  m.kind = FusionKind::kQuality;
  const FusionDecision d = ApplyFusion(m, t);
  CHECK(d.score == 0.5);
  CHECK(d.accept);

  FusionModel pick;
  pick.alpha = {1.0, 0.0};
  t.scores = {-3.25, 8.0};
  CHECK(ApplyFusion(pick, t).score == -3.25);
  CHECK_FALSE(ApplyFusion(pick, t).accept);
}

TEST_CASE("a fused score of exactly zero is accepted") {
  TrialRecord t;
  t.scores = {2.0, -2.0};
  FusionModel m;
  m.alpha = {1.0, 1.0};
  const FusionDecision d = ApplyFusion(m, t);
  CHECK(d.score == 0.0);
  CHECK(d.accept);
}

TEST_CASE("decisions are invariant to positive rescaling") {
  std::mt19937_64 rng(9);
  const auto trials = MakeDev(200, rng);
  FusionModel m;
  m.alpha = {0.8, -0.3};
  m.theta = 0.25;
  m.beta = -0.6;
  m.kind = FusionKind::kQuality;
  for (double c : {0.5, 4.0}) {
    FusionModel s = m;
    s.alpha = {c * m.alpha[0], c * m.alpha[1]};
    s.theta *= c;
    s.beta *= c;
    for (const auto &t : trials) CHECK(ApplyFusion(m, t).accept == ApplyFusion(s, t).accept);
  }
}

TEST_CASE("quality fusion needs both qualities at apply time") {
  TrialRecord t;
  FusionModel m;
  m.kind = FusionKind::kQuality;
  CHECK_THROWS_AS(ApplyFusion(m, t), Error);
  m.kind = FusionKind::kLinear;
  CHECK_NOTHROW(ApplyFusion(m, t));
}

TEST_CASE("fusion kind names round trip") {
  CHECK(ParseFusionKind(FusionKindName(FusionKind::kLinear)) == FusionKind::kLinear);
  CHECK(ParseFusionKind(FusionKindName(FusionKind::kQuality)) == FusionKind::kQuality);
  CHECK_THROWS_AS(ParseFusionKind("cubic"), Error);
}

TEST_CASE("eer hand cases") {
  CHECK(ComputeEer(std::vector<double>{2, 3}, std::vector<double>{0, 1}) == 0.0);
  CHECK(ComputeEer(std::vector<double>{0, 1}, std::vector<double>{2, 3}) == 1.0);
  CHECK(ComputeEer(std::vector<double>{1, 1}, std::vector<double>{1, 1}) == doctest::Approx(0.5));
}

TEST_CASE("eer and min dcf match exhaustive enumeration") {
  std::mt19937_64 rng(10);
  const DetCost cost;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> tar = Uniform(50, rng, -1.0, 2.0);
    std::vector<double> non = Uniform(50, rng, -2.0, 1.0);
    if (rep % 5 == 0) {
      // Force ties inside and across classes.
      for (auto &x : tar) x = std::round(x * 4) / 4;
      for (auto &x : non) x = std::round(x * 4) / 4;
    }
    CHECK(ComputeEer(tar, non) == oracle::ExhaustiveEer(tar, non));
    CHECK(ComputeMinDcf(tar, non, cost) ==
          oracle::ExhaustiveMinDcf(tar, non, cost.c_miss, cost.c_fa, cost.p_tar));
    CHECK(std::abs(ComputeEer(tar, non) - oracle::ExhaustiveEer(tar, non)) < 1e-12);
  }
}

TEST_CASE("min dcf of separated and degenerate scores") {
  const DetCost cost;
  CHECK(ComputeMinDcf(std::vector<double>{5, 6}, std::vector<double>{1, 2}, cost) == 0.0);
  const std::vector<double> same(10, 0.3);
  const double expected = std::min(cost.c_miss * cost.p_tar, cost.c_fa * (1 - cost.p_tar));
  CHECK(ComputeMinDcf(same, same, cost) == doctest::Approx(expected).epsilon(1e-15));
  DetCost flipped{1.0, 10.0, 0.9};
  CHECK(ComputeMinDcf(same, same, flipped) ==
        doctest::Approx(std::min(0.9, 10.0 * 0.1)).epsilon(1e-15));
}

TEST_CASE("metrics are invariant to increasing transforms") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> u(-500, 500);
  std::vector<double> tar(80), non(120);
  for (auto &x : tar) x = u(rng) + 100;
  for (auto &x : non) x = u(rng);
  const auto transform = [](std::vector<double> v) {
    for (auto &x : v) x = x * x * x + 7.0 * x;
    return v;
  };
  CHECK(ComputeEer(tar, non) == ComputeEer(transform(tar), transform(non)));
  CHECK(ComputeMinDcf(tar, non) == ComputeMinDcf(transform(tar), transform(non)));
}

TEST_CASE("det curve endpoints") {
  const auto pts = DetCurve(std::vector<double>{1, 2, 3}, std::vector<double>{0, 2});
  REQUIRE(pts.size() == 5);
  CHECK(pts.front().p_miss == 0.0);
  CHECK(pts.front().p_fa == 1.0);
  CHECK(pts.back().p_miss == 1.0);
  CHECK(pts.back().p_fa == 0.0);
  CHECK(std::isinf(pts.back().threshold));
}

TEST_CASE("metric errors") {
  const std::vector<double> none;
  const std::vector<double> some{1.0};
  try {
    ComputeEer(none, some);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kInsufficientData);
  }
  CHECK_THROWS_AS(ComputeMinDcf(some, none), Error);
  const std::vector<double> bad{std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(ComputeEer(bad, some), Error);
}

TEST_CASE("split by label and evaluate") {
  const std::vector<double> scores{0.1, 0.9, 0.4, 0.8};
  const std::vector<bool> labels{false, true, false, true};
  std::vector<double> tar, non;
  SplitByLabel(scores, labels, &tar, &non);
  CHECK(tar == std::vector<double>{0.9, 0.8});
  CHECK(non == std::vector<double>{0.1, 0.4});
  const DetMetrics m = Evaluate(tar, non);
  CHECK(m.eer == 0.0);
  CHECK(m.min_dcf == 0.0);
  CHECK_THROWS_AS(SplitByLabel(scores, {true}, &tar, &non), Error);
}

}  // TEST_SUITE

}  // namespace asvq
