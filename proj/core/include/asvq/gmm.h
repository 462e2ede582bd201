// core/include/asvq/gmm.h

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

#ifndef ASVQ_GMM_H_
#define ASVQ_GMM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "asvq/common.h"
#include "asvq/parallel.h"

namespace asvq {

struct BwStats;

/// Diagonal-covariance Gaussian mixture.  Used both for the UBM and for
/// mean-adapted speaker models.
struct Gmm {
  Vector weights;       // K
  RowMatrix means;      // K x d
  RowMatrix variances;  // K x d

  int NumComponents() const { return static_cast<int>(weights.size()); }
  int Dim() const { return static_cast<int>(means.cols()); }

  /// Checks shapes, weight normalization (1e-9), non-negative weights and
  /// strictly positive finite variances.
  void Validate() const;
};

struct ComponentDensities {
  Vector log_component;  // log p_i(x), without the weight
  double log_total = 0;  // log sum_i w_i p_i(x)
};

/// Log densities of a single vector.  Throws kDimensionMismatch.
ComponentDensities LogDensity(const Gmm &gmm, const Vector &x);

/// Precomputed per-component constants for batch evaluation of a Gmm.
class GmmEvaluator {
 public:
  explicit GmmEvaluator(const Gmm &gmm);

  /// frames x K matrix of log w_i + log p_i(x_t).
  RowMatrix WeightedLogLikes(const FeatureMatrix &features) const;

  int NumComponents() const { return static_cast<int>(gconst_.size()); }
  int Dim() const { return static_cast<int>(inv_var_.cols()); }

 private:
  Vector gconst_;         // log w_i - 0.5 (d log 2pi + sum log v + sum mu^2/v)
  RowMatrix inv_var_;     // K x d
  RowMatrix mean_invvar_; // K x d
};

/// Responsibilities Pr(i|x_t), one row per frame, computed in the log
/// domain.  If total_log_like is non-null it receives sum_t log p(x_t).
RowMatrix Posteriors(const Gmm &gmm, const FeatureMatrix &features,
                     double *total_log_like = nullptr);
RowMatrix Posteriors(const GmmEvaluator &eval, const FeatureMatrix &features,
                     double *total_log_like = nullptr);

/// sum_t log p(x_t | gmm).
double TotalLogLikelihood(const Gmm &gmm, const FeatureMatrix &features);

struct EmConfig {
  int n_iters = 20;
  double convergence_tol = 1e-7;  // stop when relative LL change is below
  double variance_floor = 1e-3;   // fraction of the per-dim global variance
  std::uint64_t seed = 0;
  int kmeans_init_iters = 10;
  Parallelism parallel;
};

/// Per-iteration objective values of an EM run.  objective[0] is evaluated
/// at the initial parameters, objective[k] after k updates.
struct EmTrace {
  std::vector<double> objective;
};

/// Trains a K-component UBM: k-means++ seeding, Lloyd iterations, then EM.
/// Components whose responsibility mass falls below 1e-6 are re-seeded at
/// the worst-fit frame.  Throws kInsufficientData for an empty corpus or
/// fewer frames than components.
Gmm TrainUbm(std::span<const FeatureMatrix> corpus, int num_components,
             const EmConfig &cfg, EmTrace *trace = nullptr);

/// Mean-only MAP adaptation: mean_i = a_i E_i + (1 - a_i) mu_i with
/// a_i = N_i / (N_i + relevance).  Weights and variances are copied.
Gmm MapAdaptMeans(const Gmm &ubm, const BwStats &stats,
                  double relevance = 16.0);

enum class LlrNormalization { kFrameAverage, kRawSum };

/// log p(X | target) - log p(X | ubm), divided by the frame count unless
/// kRawSum is requested.  Throws for empty features or mismatched models.
double ScoreGmmUbm(const Gmm &target, const Gmm &ubm,
                   const FeatureMatrix &test,
                   LlrNormalization norm = LlrNormalization::kFrameAverage);

}  // namespace asvq

#endif  // ASVQ_GMM_H_
