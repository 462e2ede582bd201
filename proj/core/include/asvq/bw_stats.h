// core/include/asvq/bw_stats.h

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

#ifndef ASVQ_BW_STATS_H_
#define ASVQ_BW_STATS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "asvq/common.h"
#include "asvq/gmm.h"

namespace asvq {

/// Components with less occupancy than this are treated as unobserved.
inline constexpr double kUnobservedOccupancy = 1e-10;

/// Zeroth and first order Baum-Welch statistics of one utterance against a
/// UBM.  e holds the occupancy-normalized first order statistic, i.e. the
/// posterior-weighted frame mean of each component.
struct BwStats {
  Vector n;            // K
  RowMatrix e;         // K x d
  std::int64_t frames = 0;

  int NumComponents() const { return static_cast<int>(n.size()); }
  int Dim() const { return static_cast<int>(e.cols()); }
  bool IsObserved(int i) const { return n(i) >= kUnobservedOccupancy; }
};

/// Accumulates statistics of the frames against the UBM.  Unobserved
/// components get e_i = UBM mean_i.  Throws for empty features or a
/// dimension mismatch.
BwStats AccumulateBw(const Gmm &ubm, const FeatureMatrix &features);
BwStats AccumulateBw(const GmmEvaluator &eval, const Gmm &ubm,
                     const FeatureMatrix &features);

/// Duration-normalized zeroth order statistics, N_i / C.
struct Nbs {
  Vector values;
};

Nbs NormalizeZeroth(const BwStats &stats);

/// Dissimilarity between an NBS vector and the UBM weights.
using NbsDissimilarity = std::function<double(const Vector &, const Vector &)>;

/// sum_i |a_i - b_i|.
double L1Dissimilarity(const Vector &a, const Vector &b);

/// Estimation quality of an utterance: the dissimilarity (L1 by default)
/// between its NBS and the UBM weights.  Lies in [0, 2) for L1.
double Quality(const Nbs &nbs, const Gmm &ubm,
               const NbsDissimilarity &metric = L1Dissimilarity);

/// Per-component sample mean and unbiased standard deviation of a set of
/// NBS vectors.
struct NbsPopulation {
  Vector mean;
  Vector stddev;
  std::string label;
  std::size_t count = 0;
};

NbsPopulation NbsPopulationStats(std::span<const Nbs> nbs_set,
                                 std::string label = {});

/// PCA of a set of NBS vectors.  The basis columns are the leading
/// eigenvectors of the sample covariance in descending eigenvalue order,
/// each signed so that its first nonzero coordinate is positive.
struct PcaProjection {
  Vector center;        // K
  RowMatrix basis;      // K x n_components
  Vector eigenvalues;   // n_components
  RowMatrix points;     // n x n_components
};

PcaProjection PcaProject(std::span<const Nbs> nbs_set, int n_components = 2);

}  // namespace asvq

#endif  // ASVQ_BW_STATS_H_
