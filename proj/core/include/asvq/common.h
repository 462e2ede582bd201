// core/include/asvq/common.h

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

#ifndef ASVQ_COMMON_H_
#define ASVQ_COMMON_H_

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace asvq {

/// Row-major dense matrix. Feature matrices are frames x dims, GMM
/// parameter matrices are components x dims.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// One utterance worth of acoustic feature vectors, one frame per row.
using FeatureMatrix = RowMatrix;

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kInsufficientData,
  kFormat,
  kIo,
  kNumerical,
};

std::string_view ErrorKindName(ErrorKind kind);

/// All library failures are reported with this exception type.  The kind
/// lets command-line front ends emit machine-parsable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Log of the sum of exponentials, stable for large magnitudes and -inf
/// entries.  Returns -inf for an empty or all -inf input.
double LogSumExp(const double *values, std::size_t n);

template <class Derived>
double LogSumExp(const Eigen::DenseBase<Derived> &values) {
  Eigen::VectorXd tmp = values.derived().template cast<double>();
  return LogSumExp(tmp.data(), static_cast<std::size_t>(tmp.size()));
}

/// Derives an independent 64-bit seed from a base seed and a stream index
/// (splitmix64 finalizer).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace asvq

#endif  // ASVQ_COMMON_H_
