// core/src/linalg.cc

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

#include "linalg.h"

#include <cmath>
#include <string>

namespace asvq::internal {

Eigen::LLT<Eigen::MatrixXd> SpdFactor(const Eigen::MatrixXd &a,
                                      const char *what) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().mean());
  Eigen::MatrixXd jittered = a;
  jittered.diagonal().array() += kSpdJitter * scale;
  llt.compute(jittered);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical,
                std::string(what) + " is not positive definite");
  return llt;
}

double LogDet(const Eigen::LLT<Eigen::MatrixXd> &llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace asvq::internal
