// core/include/asvq/plda.h

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

#ifndef ASVQ_PLDA_H_
#define ASVQ_PLDA_H_

#include <span>
#include <string>
#include <vector>

#include "asvq/common.h"
#include "asvq/gmm.h"
#include "asvq/ivector.h"

namespace asvq {

/// Gaussian PLDA with a low-rank speaker subspace and full residual:
///   y = mu + V h + eps,  h ~ N(0, I_r),  eps ~ N(0, residual_cov).
struct PldaModel {
  Vector mu;               // R
  RowMatrix v;             // R x r
  RowMatrix residual_cov;  // R x R

  int Dim() const { return static_cast<int>(mu.size()); }
  int SpeakerRank() const { return static_cast<int>(v.cols()); }
  void Validate() const;
};

struct PldaConfig {
  int rank = 150;
  int n_iters = 10;
};

/// EM training on labeled i-vectors (speakers[k] labels ivectors[k]).  The
/// global mean is subtracted first and kept fixed.  Requires at least two
/// speakers and one speaker with two or more utterances.
PldaModel TrainPlda(std::span<const IVector> ivectors,
                    std::span<const std::string> speakers,
                    const PldaConfig &cfg, EmTrace *trace = nullptr);

/// Marginal log-likelihood of labeled data under the model.
double PldaObjective(const PldaModel &model, std::span<const IVector> ivectors,
                     std::span<const std::string> speakers);

/// Verification log-likelihood ratio in the two-covariance form with
/// between = V V' and within = residual_cov.  Quadratic-form matrices are
/// precomputed once per model.
class PldaScorer {
 public:
  /// Throws kNumerical when the model covariances are not positive
  /// definite.
  explicit PldaScorer(const PldaModel &model);

  double Score(const Vector &enroll, const Vector &test) const;
  double Score(const IVector &enroll, const IVector &test) const {
    return Score(enroll.y, test.y);
  }

 private:
  Vector mu_;
  RowMatrix q_;  // applied to each side
  RowMatrix p_;  // cross term
  double offset_ = 0;
};

double ScorePlda(const PldaModel &model, const IVector &enroll,
                 const IVector &test);

}  // namespace asvq

#endif  // ASVQ_PLDA_H_
