// core/include/asvq/metrics.h

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

#ifndef ASVQ_METRICS_H_
#define ASVQ_METRICS_H_

#include <span>
#include <vector>

namespace asvq {

struct DetCost {
  double c_miss = 10.0;
  double c_fa = 1.0;
  double p_tar = 0.01;
};

/// Miss and false-alarm rates when accepting every score >= threshold.
struct OperatingPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

/**
   Operating points at every distinct score (ascending) followed by the
   reject-all point at +infinity.  The first point accepts everything.
   Throws kInsufficientData if either class is empty.
*/
std::vector<OperatingPoint> DetCurve(std::span<const double> target_scores,
                                     std::span<const double> nontarget_scores);

/**
   Equal error rate as a fraction.  Walks the operating points in threshold
   order; if some point has p_miss == p_fa that value is returned, otherwise
   the first pair of adjacent points where p_miss - p_fa changes sign is
   joined by a straight line and the crossing with p_miss == p_fa is
   returned.
*/
double ComputeEer(std::span<const double> target_scores,
                  std::span<const double> nontarget_scores);

/// min over thresholds of c_miss p_miss p_tar + c_fa p_fa (1 - p_tar).
double ComputeMinDcf(std::span<const double> target_scores,
                     std::span<const double> nontarget_scores,
                     const DetCost &cost = {});

struct DetMetrics {
  double eer = 0;
  double min_dcf = 0;
  DetCost cost;
};

DetMetrics Evaluate(std::span<const double> target_scores,
                    std::span<const double> nontarget_scores,
                    const DetCost &cost = {});

/// Splits scores by a parallel label vector (true = target).
void SplitByLabel(std::span<const double> scores, const std::vector<bool> &labels,
                  std::vector<double> *target_scores,
                  std::vector<double> *nontarget_scores);

}  // namespace asvq

#endif  // ASVQ_METRICS_H_
