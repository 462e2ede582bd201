// core/include/asvq/fusion.h

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

#ifndef ASVQ_FUSION_H_
#define ASVQ_FUSION_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace asvq {

inline constexpr int kNumFusedSystems = 2;

/// One verification trial with the scores of the two base systems
/// (GMM-UBM first, i-vector/PLDA second) and optional side qualities.
struct TrialRecord {
  std::string enroll_id;
  std::string test_id;
  bool is_target = false;
  std::array<double, kNumFusedSystems> scores{};
  std::optional<double> q_enroll;
  std::optional<double> q_test;
};

enum class FusionKind { kLinear, kQuality };

std::string_view FusionKindName(FusionKind kind);
/// Throws kFormat for unknown names.
FusionKind ParseFusionKind(std::string_view name);

/// f(L) = alpha' L + theta + beta * q_enroll * q_test (beta = 0 for linear).
struct FusionModel {
  std::array<double, kNumFusedSystems> alpha{};
  double theta = 0;
  double beta = 0;
  FusionKind kind = FusionKind::kLinear;
  double prior = 0.5;  // effective prior used in training
};

struct FusionTrainConfig {
  double effective_prior = 0.5;
  double reg_lambda = 1e-6;
  int max_iters = 200;
  double tolerance = 1e-10;  // relative cost change
};

struct FusionTrainResult {
  FusionModel model;
  double cost = 0;  // objective at the returned model
  int iterations = 0;
};

/// Prior-weighted logistic cost of a model on labeled trials, plus
/// reg_lambda * |alpha|^2:
///   P/|T| sum_T log(1 + e^-(f + lo)) + (1-P)/|N| sum_N log(1 + e^(f + lo))
/// with lo = logit(P).  The fused score is therefore a log-likelihood
/// ratio.
double FusionCost(const FusionModel &model, std::span<const TrialRecord> dev,
                  const FusionTrainConfig &cfg);

/// Damped Newton minimization of FusionCost over (alpha, theta).  Throws
/// kInsufficientData unless both classes are present.
FusionTrainResult TrainLinearFusion(std::span<const TrialRecord> dev,
                                    const FusionTrainConfig &cfg = {});

/// Same objective over (alpha, theta, beta) with the quality product term.
/// Throws kInvalidArgument when a trial lacks either quality.
FusionTrainResult TrainQualityFusion(std::span<const TrialRecord> dev,
                                     const FusionTrainConfig &cfg = {});

/// Affine calibration a * score_k + theta of base system k alone, expressed
/// as a FusionModel with the other alpha entry fixed at zero.
FusionTrainResult TrainSingleSystemCalibration(std::span<const TrialRecord> dev,
                                               int system,
                                               const FusionTrainConfig &cfg = {});

struct FusionDecision {
  double score = 0;
  bool accept = false;  // score >= 0
};

FusionDecision ApplyFusion(const FusionModel &model, const TrialRecord &trial);

}  // namespace asvq

#endif  // ASVQ_FUSION_H_
