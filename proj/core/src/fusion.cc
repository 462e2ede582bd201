// core/src/fusion.cc

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

#include "asvq/fusion.h"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "asvq/common.h"

namespace asvq {

namespace {

double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Logit(double p) { return std::log(p) - std::log1p(-p); }

// Design matrix of a logistic problem: one row per trial, last column the
// bias.  penalized[j] marks the columns carrying an alpha weight.
struct LogisticProblem {
  Eigen::MatrixXd x;
  std::vector<bool> is_target;
  std::vector<bool> penalized;
  double target_weight = 0;     // P / |T|
  double nontarget_weight = 0;  // (1 - P) / |N|
  double offset = 0;            // logit(P)
  double reg_lambda = 0;
};

void CheckConfig(const FusionTrainConfig &cfg) {
  if (!(cfg.effective_prior > 0 && cfg.effective_prior < 1))
    throw Error(ErrorKind::kInvalidArgument, "effective prior must lie in (0, 1)");
  if (!(cfg.reg_lambda >= 0))
    throw Error(ErrorKind::kInvalidArgument, "regularization must be >= 0");
}

void CheckQualities(const TrialRecord &t) {
  if (!t.q_enroll || !t.q_test)
    throw Error(ErrorKind::kInvalidArgument,
                "missing quality for trial " + t.enroll_id + " " + t.test_id);
}

// systems: indices of base scores used as features.
LogisticProblem BuildProblem(std::span<const TrialRecord> dev,
                             const std::vector<int> &systems, bool with_quality,
                             const FusionTrainConfig &cfg) {
  CheckConfig(cfg);
  LogisticProblem prob;
  const Eigen::Index cols = static_cast<Eigen::Index>(systems.size()) + (with_quality ? 1 : 0) + 1;
  prob.x.resize(static_cast<Eigen::Index>(dev.size()), cols);
  std::size_t n_tar = 0;
  for (std::size_t r = 0; r < dev.size(); ++r) {
    const TrialRecord &t = dev[r];
    Eigen::Index c = 0;
    for (int s : systems) {
      if (!std::isfinite(t.scores[s]))
        throw Error(ErrorKind::kInvalidArgument, "non-finite score in fusion input");
      prob.x(r, c++) = t.scores[s];
    }
    if (with_quality) {
      CheckQualities(t);
      prob.x(r, c++) = *t.q_enroll * *t.q_test;
    }
    prob.x(r, c) = 1.0;
    prob.is_target.push_back(t.is_target);
    n_tar += t.is_target ? 1 : 0;
  }
  const std::size_t n_non = dev.size() - n_tar;
  if (n_tar == 0 || n_non == 0)
    throw Error(ErrorKind::kInsufficientData,
                "fusion training needs both target and nontarget trials");
  prob.penalized.assign(cols, false);
  for (std::size_t j = 0; j < systems.size(); ++j) prob.penalized[j] = true;
  prob.target_weight = cfg.effective_prior / static_cast<double>(n_tar);
  prob.nontarget_weight = (1.0 - cfg.effective_prior) / static_cast<double>(n_non);
  prob.offset = Logit(cfg.effective_prior);
  prob.reg_lambda = cfg.reg_lambda;
  return prob;
}

double Objective(const LogisticProblem &p, const Eigen::VectorXd &w) {
  const Eigen::VectorXd z = p.x * w;
  double cost = 0.0;
  for (Eigen::Index r = 0; r < z.size(); ++r) {
    const double a = z(r) + p.offset;
    cost += p.is_target[r] ? p.target_weight * Softplus(-a)
                           : p.nontarget_weight * Softplus(a);
  }
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (p.penalized[j]) cost += p.reg_lambda * w(j) * w(j);
  return cost;
}

struct Minimum {
  Eigen::VectorXd w;
  double cost;
  int iterations;
};

Minimum MinimizeNewton(const LogisticProblem &p, const FusionTrainConfig &cfg) {
  const Eigen::Index n = p.x.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  double cost = Objective(p, w);
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    const Eigen::VectorXd z = p.x * w;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd curvature(z.size());
    for (Eigen::Index r = 0; r < z.size(); ++r) {
      const double s = Sigmoid(z(r) + p.offset);
      const double weight = p.is_target[r] ? p.target_weight : p.nontarget_weight;
      grad.noalias() += weight * (p.is_target[r] ? s - 1.0 : s) * p.x.row(r).transpose();
      curvature(r) = weight * s * (1.0 - s);
    }
    hess.noalias() = p.x.transpose() * curvature.asDiagonal() * p.x;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!p.penalized[j]) continue;
      grad(j) += 2.0 * p.reg_lambda * w(j);
      hess(j, j) += 2.0 * p.reg_lambda;
    }
    if (grad.norm() < 1e-15) break;
    // Tiny ridge keeps the step defined when a feature is collinear with
    // the bias (constant quality).
    hess.diagonal().array() += 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    if (!step.allFinite() || step.dot(grad) >= 0) step = -grad;

    double t = 1.0, next_cost = Objective(p, w + step);
    for (int halvings = 0; halvings < 60 && !(next_cost <= cost); ++halvings) {
      t *= 0.5;
      next_cost = Objective(p, w + t * step);
    }
    if (!(next_cost <= cost)) break;
    w += t * step;
    const double change = cost - next_cost;
    cost = next_cost;
    if (change <= cfg.tolerance * std::max(std::abs(cost), 1e-300)) {
      ++iter;
      break;
    }
  }
  return {w, cost, iter};
}

FusionModel ModelFromWeights(const Eigen::VectorXd &w, const std::vector<int> &systems,
                             bool with_quality, const FusionTrainConfig &cfg) {
  FusionModel m;
  Eigen::Index c = 0;
  for (int s : systems) m.alpha[s] = w(c++);
  if (with_quality) m.beta = w(c++);
  m.theta = w(c);
  m.kind = with_quality ? FusionKind::kQuality : FusionKind::kLinear;
  m.prior = cfg.effective_prior;
  return m;
}

FusionTrainResult Train(std::span<const TrialRecord> dev, const std::vector<int> &systems,
                        bool with_quality, const FusionTrainConfig &cfg) {
  const LogisticProblem prob = BuildProblem(dev, systems, with_quality, cfg);
  const Minimum min = MinimizeNewton(prob, cfg);
  return {ModelFromWeights(min.w, systems, with_quality, cfg), min.cost, min.iterations};
}

}  // namespace

std::string_view FusionKindName(FusionKind kind) {
  return kind == FusionKind::kQuality ? "quality" : "linear";
}

FusionKind ParseFusionKind(std::string_view name) {
  if (name == "linear") return FusionKind::kLinear;
  if (name == "quality") return FusionKind::kQuality;
  throw Error(ErrorKind::kFormat, "unknown fusion kind '" + std::string(name) + "'");
}

double FusionCost(const FusionModel &model, std::span<const TrialRecord> dev,
                  const FusionTrainConfig &cfg) {
  const bool with_quality = model.kind == FusionKind::kQuality;
  const LogisticProblem prob = BuildProblem(dev, {0, 1}, with_quality, cfg);
  Eigen::VectorXd w(prob.x.cols());
  Eigen::Index c = 0;
  for (double a : model.alpha) w(c++) = a;
  if (with_quality) w(c++) = model.beta;
  w(c) = model.theta;
  return Objective(prob, w);
}

FusionTrainResult TrainLinearFusion(std::span<const TrialRecord> dev,
                                    const FusionTrainConfig &cfg) {
  return Train(dev, {0, 1}, false, cfg);
}

FusionTrainResult TrainQualityFusion(std::span<const TrialRecord> dev,
                                     const FusionTrainConfig &cfg) {
  return Train(dev, {0, 1}, true, cfg);
}

FusionTrainResult TrainSingleSystemCalibration(std::span<const TrialRecord> dev,
                                               int system,
                                               const FusionTrainConfig &cfg) {
  if (system < 0 || system >= kNumFusedSystems)
    throw Error(ErrorKind::kInvalidArgument, "system index out of range");
  return Train(dev, {system}, false, cfg);
}

FusionDecision ApplyFusion(const FusionModel &model, const TrialRecord &trial) {
  double score = model.theta;
  for (int s = 0; s < kNumFusedSystems; ++s) score += model.alpha[s] * trial.scores[s];
  if (model.kind == FusionKind::kQuality) {
    CheckQualities(trial);
    score += model.beta * *trial.q_enroll * *trial.q_test;
  }
  return {score, score >= 0.0};
}

}  // namespace asvq
