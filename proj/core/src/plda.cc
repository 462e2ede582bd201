// core/src/plda.cc

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

#include "asvq/plda.h"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "linalg.h"

namespace asvq {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct SpeakerGroups {
  std::vector<std::vector<std::size_t>> members;  // first-appearance order
};

SpeakerGroups GroupBySpeaker(std::span<const std::string> speakers) {
  SpeakerGroups g;
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < speakers.size(); ++k) {
    auto [it, inserted] = index.emplace(speakers[k], g.members.size());
    if (inserted) g.members.emplace_back();
    g.members[it->second].push_back(k);
  }
  return g;
}

RowMatrix Stack(std::span<const IVector> ivectors) {
  const Eigen::Index dim = ivectors.front().y.size();
  RowMatrix x(ivectors.size(), dim);
  for (std::size_t k = 0; k < ivectors.size(); ++k) {
    if (ivectors[k].y.size() != dim)
      throw Error(ErrorKind::kDimensionMismatch, "i-vectors differ in dimension");
    x.row(k) = ivectors[k].y.transpose();
  }
  return x;
}

// Sufficient quantities of the current model shared by the E-step and the
// objective.
struct PldaEStep {
  Eigen::LLT<Eigen::MatrixXd> residual_llt;
  Eigen::MatrixXd vt_sinv;    // r x R
  Eigen::MatrixXd vt_sinv_v;  // r x r
  double log_det_residual;

  explicit PldaEStep(const PldaModel &m)
      : residual_llt(internal::SpdFactor(m.residual_cov, "plda residual covariance")) {
    vt_sinv = residual_llt.solve(Eigen::MatrixXd(m.v)).transpose();
    vt_sinv_v = vt_sinv * m.v;
    log_det_residual = internal::LogDet(residual_llt);
  }
};

struct PldaAccum {
  Eigen::MatrixXd c;  // R x r, sum over speakers of (sum_j y_j) E[h]'
  Eigen::MatrixXd a;  // r x r, sum over speakers of n E[hh']
  double objective = 0.0;
};

// Visits every speaker once with its posterior over h.
PldaAccum RunEStep(const PldaModel &model, const RowMatrix &centered,
                   const SpeakerGroups &groups) {
  const PldaEStep e(model);
  const int dim = model.Dim(), r = model.SpeakerRank();
  PldaAccum acc{Eigen::MatrixXd::Zero(dim, r), Eigen::MatrixXd::Zero(r, r), 0.0};
  for (const auto &members : groups.members) {
    const double n = static_cast<double>(members.size());
    Vector sum = Vector::Zero(dim);
    double quad = 0.0;
    for (std::size_t k : members) {
      const Vector y = centered.row(k).transpose();
      sum += y;
      quad += y.dot(e.residual_llt.solve(y));
    }
    Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(r, r) + n * e.vt_sinv_v;
    const auto llt = internal::SpdFactor(precision, "plda speaker posterior precision");
    const Vector b = e.vt_sinv * sum;
    const Vector h = llt.solve(b);
    Eigen::MatrixXd second = llt.solve(Eigen::MatrixXd::Identity(r, r));
    second.noalias() += h * h.transpose();
    acc.c.noalias() += sum * h.transpose();
    acc.a.noalias() += n * second;
    acc.objective += -0.5 * n * dim * kLog2Pi - 0.5 * n * e.log_det_residual -
                     0.5 * internal::LogDet(llt) - 0.5 * quad + 0.5 * b.dot(h);
  }
  return acc;
}

}  // namespace

void PldaModel::Validate() const {
  const Eigen::Index dim = mu.size();
  if (dim < 1) throw Error(ErrorKind::kInvalidArgument, "plda model is empty");
  if (v.rows() != dim || residual_cov.rows() != dim || residual_cov.cols() != dim)
    throw Error(ErrorKind::kDimensionMismatch, "plda parameter shapes disagree");
  if (v.cols() < 1 || v.cols() > dim)
    throw Error(ErrorKind::kInvalidArgument, "plda speaker rank must lie in [1, R]");
  if (!mu.allFinite() || !v.allFinite() || !residual_cov.allFinite())
    throw Error(ErrorKind::kInvalidArgument, "plda model has non-finite entries");
}

PldaModel TrainPlda(std::span<const IVector> ivectors,
                    std::span<const std::string> speakers, const PldaConfig &cfg,
                    EmTrace *trace) {
  if (ivectors.size() != speakers.size())
    throw Error(ErrorKind::kDimensionMismatch, "i-vector and label counts differ");
  if (ivectors.empty())
    throw Error(ErrorKind::kInsufficientData, "no i-vectors for plda training");
  const SpeakerGroups groups = GroupBySpeaker(speakers);
  if (groups.members.size() < 2)
    throw Error(ErrorKind::kInsufficientData,
                "degenerate labeling: plda training needs at least two speakers");
  bool has_repeat = false;
  for (const auto &m : groups.members) has_repeat |= m.size() >= 2;
  if (!has_repeat)
    throw Error(ErrorKind::kInsufficientData,
                "degenerate labeling: no speaker has two or more utterances");
  RowMatrix x = Stack(ivectors);
  const Eigen::Index dim = x.cols();
  if (cfg.rank < 1 || cfg.rank > dim) {
    std::ostringstream msg;
    msg << "plda rank " << cfg.rank << " must lie in [1, " << dim << "]";
    throw Error(ErrorKind::kInvalidArgument, msg.str());
  }
  const double total = static_cast<double>(x.rows());

  PldaModel model;
  model.mu = x.colwise().mean().transpose();
  x.rowwise() -= model.mu.transpose();
  const Eigen::MatrixXd scatter = x.transpose() * x;

  // Initialize from the between- and within-speaker scatter.
  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto &members : groups.members) {
    Vector mean = Vector::Zero(dim);
    for (std::size_t k : members) mean += x.row(k).transpose();
    mean /= static_cast<double>(members.size());
    between += static_cast<double>(members.size()) * mean * mean.transpose();
    for (std::size_t k : members) {
      const Vector dev = x.row(k).transpose() - mean;
      within += dev * dev.transpose();
    }
  }
  between /= total;
  within /= total;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(between);
  const double floor = 1e-6 * std::max(within.trace() / dim, 1e-12);
  model.v.resize(dim, cfg.rank);
  for (int c = 0; c < cfg.rank; ++c) {
    const Eigen::Index src = dim - 1 - c;
    model.v.col(c) =
        eig.eigenvectors().col(src) * std::sqrt(std::max(eig.eigenvalues()(src), floor));
  }
  model.residual_cov = within;

  if (trace) trace->objective.clear();
  for (int iter = 0; iter < cfg.n_iters; ++iter) {
    const PldaAccum acc = RunEStep(model, x, groups);
    if (trace) trace->objective.push_back(acc.objective);
    const auto a_llt = internal::SpdFactor(acc.a, "plda m-step system");
    model.v = a_llt.solve(acc.c.transpose()).transpose();
    Eigen::MatrixXd residual = (scatter - model.v * acc.c.transpose()) / total;
    model.residual_cov = 0.5 * (residual + residual.transpose());
  }
  if (trace) trace->objective.push_back(RunEStep(model, x, groups).objective);
  return model;
}

double PldaObjective(const PldaModel &model, std::span<const IVector> ivectors,
                     std::span<const std::string> speakers) {
  model.Validate();
  if (ivectors.size() != speakers.size() || ivectors.empty())
    throw Error(ErrorKind::kDimensionMismatch, "i-vector and label counts differ");
  RowMatrix x = Stack(ivectors);
  if (x.cols() != model.Dim())
    throw Error(ErrorKind::kDimensionMismatch, "i-vector dim does not match plda");
  x.rowwise() -= model.mu.transpose();
  return RunEStep(model, x, GroupBySpeaker(speakers)).objective;
}

PldaScorer::PldaScorer(const PldaModel &model) : mu_(model.mu) {
  model.Validate();
  const Eigen::Index dim = model.Dim();
  const Eigen::MatrixXd between = model.v * model.v.transpose();
  const Eigen::MatrixXd total = between + model.residual_cov;
  const Eigen::LLT<Eigen::MatrixXd> total_llt(total);
  if (total_llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "plda total covariance is not positive definite");
  const Eigen::MatrixXd total_inv =
      total_llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  // Joint covariance of a same-speaker pair is [[T, B], [B, T]]; invert it
  // through the Schur complement T - B T^-1 B.
  const Eigen::MatrixXd schur = total - between * total_inv * between;
  const Eigen::LLT<Eigen::MatrixXd> schur_llt(0.5 * (schur + schur.transpose()));
  if (schur_llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "plda within-speaker covariance is not positive definite");
  const Eigen::MatrixXd diag_block = schur_llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  const Eigen::MatrixXd cross_block = -total_inv * between * diag_block;
  q_ = total_inv - diag_block;
  q_ = 0.5 * (q_ + q_.transpose()).eval();
  p_ = -cross_block;
  p_ = 0.5 * (p_ + p_.transpose()).eval();
  offset_ = -0.5 * (internal::LogDet(total_llt) + internal::LogDet(schur_llt)) +
            internal::LogDet(total_llt);
}

double PldaScorer::Score(const Vector &enroll, const Vector &test) const {
  if (enroll.size() != mu_.size() || test.size() != mu_.size())
    throw Error(ErrorKind::kDimensionMismatch, "i-vector dim does not match plda");
  const Vector e = enroll - mu_;
  const Vector t = test - mu_;
  return 0.5 * e.dot(q_ * e) + 0.5 * t.dot(q_ * t) + e.dot(p_ * t) + offset_;
}

double ScorePlda(const PldaModel &model, const IVector &enroll,
                 const IVector &test) {
  return PldaScorer(model).Score(enroll, test);
}

}  // namespace asvq
