// core/src/metrics.cc

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

#include "asvq/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asvq/common.h"

namespace asvq {

namespace {

std::vector<double> SortedFinite(std::span<const double> scores, const char *what) {
  std::vector<double> out(scores.begin(), scores.end());
  for (double s : out)
    if (!std::isfinite(s))
      throw Error(ErrorKind::kInvalidArgument, std::string("non-finite ") + what + " score");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<OperatingPoint> DetCurve(std::span<const double> target_scores,
                                     std::span<const double> nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw Error(ErrorKind::kInsufficientData,
                "detection metrics need both target and nontarget scores");
  const std::vector<double> tar = SortedFinite(target_scores, "target");
  const std::vector<double> non = SortedFinite(nontarget_scores, "nontarget");
  const double n_tar = static_cast<double>(tar.size());
  const double n_non = static_cast<double>(non.size());

  std::vector<OperatingPoint> points;
  points.reserve(tar.size() + non.size() + 1);
  std::size_t i = 0, j = 0;  // scores below the threshold in each class
  while (i < tar.size() || j < non.size()) {
    const double threshold = std::min(i < tar.size() ? tar[i] : non[j],
                                      j < non.size() ? non[j] : tar[i]);
    points.push_back({threshold, i / n_tar, (n_non - j) / n_non});
    while (i < tar.size() && tar[i] == threshold) ++i;
    while (j < non.size() && non[j] == threshold) ++j;
  }
  points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  return points;
}

double ComputeEer(std::span<const double> target_scores,
                  std::span<const double> nontarget_scores) {
  const std::vector<OperatingPoint> points = DetCurve(target_scores, nontarget_scores);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double diff = points[k].p_miss - points[k].p_fa;
    if (diff == 0.0) return points[k].p_miss;
    if (diff > 0.0) {
      // points[0] accepts everything, so diff there is -1 and k > 0.
      const OperatingPoint &lo = points[k - 1];
      const double lo_diff = lo.p_miss - lo.p_fa;
      const double t = -lo_diff / (diff - lo_diff);
      return lo.p_miss + t * (points[k].p_miss - lo.p_miss);
    }
  }
  return 1.0;  // unreachable: the last point has p_miss 1, p_fa 0
}

double ComputeMinDcf(std::span<const double> target_scores,
                     std::span<const double> nontarget_scores,
                     const DetCost &cost) {
  if (!(cost.p_tar >= 0 && cost.p_tar <= 1) || cost.c_miss < 0 || cost.c_fa < 0)
    throw Error(ErrorKind::kInvalidArgument, "invalid detection cost parameters");
  double best = std::numeric_limits<double>::infinity();
  for (const OperatingPoint &p : DetCurve(target_scores, nontarget_scores)) {
    best = std::min(best, cost.c_miss * p.p_miss * cost.p_tar +
                              cost.c_fa * p.p_fa * (1.0 - cost.p_tar));
  }
  return best;
}

DetMetrics Evaluate(std::span<const double> target_scores,
                    std::span<const double> nontarget_scores, const DetCost &cost) {
  return DetMetrics{ComputeEer(target_scores, nontarget_scores),
                    ComputeMinDcf(target_scores, nontarget_scores, cost), cost};
}

void SplitByLabel(std::span<const double> scores, const std::vector<bool> &labels,
                  std::vector<double> *target_scores,
                  std::vector<double> *nontarget_scores) {
  if (scores.size() != labels.size())
    throw Error(ErrorKind::kDimensionMismatch, "score and label counts differ");
  target_scores->clear();
  nontarget_scores->clear();
  for (std::size_t k = 0; k < scores.size(); ++k)
    (labels[k] ? target_scores : nontarget_scores)->push_back(scores[k]);
}

}  // namespace asvq
