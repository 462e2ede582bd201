// core/src/linalg.h

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

// Internal dense linear-algebra helpers shared by the model trainers.

#ifndef ASVQ_SRC_LINALG_H_
#define ASVQ_SRC_LINALG_H_

#include <Eigen/Dense>

#include "asvq/common.h"

namespace asvq::internal {

inline constexpr double kSpdJitter = 1e-10;

/// Cholesky factor of a symmetric positive-definite matrix.  On failure the
/// factorization is retried once with kSpdJitter (scaled by the mean
/// diagonal) added to the diagonal; a second failure throws kNumerical.
Eigen::LLT<Eigen::MatrixXd> SpdFactor(const Eigen::MatrixXd &a,
                                      const char *what);

/// log|A| from its Cholesky factor.
double LogDet(const Eigen::LLT<Eigen::MatrixXd> &llt);

}  // namespace asvq::internal

#endif  // ASVQ_SRC_LINALG_H_
