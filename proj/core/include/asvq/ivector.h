// core/include/asvq/ivector.h

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

#ifndef ASVQ_IVECTOR_H_
#define ASVQ_IVECTOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asvq/bw_stats.h"
#include "asvq/common.h"
#include "asvq/gmm.h"
#include "asvq/parallel.h"

namespace asvq {

/// Total variability model: supervector mean m, low-rank loading matrix
/// Phi and diagonal residual covariance Sigma.  Supervectors are the K
/// component blocks of d dims concatenated in component order.
struct TvModel {
  Vector m_bar;    // K*d
  RowMatrix phi;   // K*d x R
  Vector sigma;    // K*d
  int num_components = 0;
  int dim = 0;

  int Rank() const { return static_cast<int>(phi.cols()); }
  int SupervectorDim() const { return num_components * dim; }
  void Validate() const;
};

struct IVector {
  Vector y;
  std::string source_utt;
};

/// Per-utterance posterior of the latent vector.
struct LatentPosterior {
  Vector mean;          // R
  RowMatrix precision;  // R x R, I + Phi' Sigma^-1 N Phi
};

/// Extraction engine with the per-component Phi_i' Sigma_i^-1 Phi_i blocks
/// precomputed.
class IvectorExtractor {
 public:
  explicit IvectorExtractor(const TvModel &tv);

  /// Posterior mean and precision of y given the statistics.
  LatentPosterior Posterior(const BwStats &stats) const;
  IVector Extract(const BwStats &stats, std::string id = {}) const;

  /// Log marginal likelihood of the statistics up to a Phi-independent
  /// constant: 0.5 b' L^-1 b - 0.5 log|L|.
  double MarginalLogLike(const BwStats &stats) const;

  const TvModel &model() const { return tv_; }

 private:
  void CheckStats(const BwStats &stats) const;
  // Returns Phi' Sigma^-1 N (E - m) for the statistics.
  Vector Projection(const BwStats &stats) const;

  TvModel tv_;
  std::vector<RowMatrix> component_gram_;  // K blocks of R x R
};

/// y = (I + Phi' Sigma^-1 N Phi)^-1 Phi' Sigma^-1 N (E - m).
IVector ExtractIvector(const TvModel &tv, const BwStats &stats,
                       std::string id = {});

struct TvConfig {
  int rank = 400;
  int n_iters = 10;
  std::uint64_t seed = 0;
  double init_scale = 0.001;
  Parallelism parallel;
};

/// Phi drawn from a seeded N(0, init_scale^2) and m, Sigma taken from the
/// UBM means and variances.
TvModel InitTvModel(const Gmm &ubm, int rank, std::uint64_t seed,
                    double init_scale = 0.001);

/// EM estimation of Phi with Sigma fixed to the UBM variances.  The trace
/// records the summed marginal log-likelihood before each update and after
/// the last one.
TvModel TrainTv(const Gmm &ubm, std::span<const BwStats> stats_set,
                const TvConfig &cfg, EmTrace *trace = nullptr);

/// Summed marginal log-likelihood (up to a constant) of a stats set.
double TvObjective(const TvModel &tv, std::span<const BwStats> stats_set,
                   const Parallelism &par = {});

/// Scales y to unit Euclidean norm (zero vectors are left alone).
IVector LengthNormalize(const IVector &ivec);

}  // namespace asvq

#endif  // ASVQ_IVECTOR_H_
