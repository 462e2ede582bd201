// core/src/bw_stats.cc

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

#include "asvq/bw_stats.h"

#include <cmath>
#include <sstream>

namespace asvq {

BwStats AccumulateBw(const GmmEvaluator &eval, const Gmm &ubm,
                     const FeatureMatrix &features) {
  if (features.rows() == 0)
    throw Error(ErrorKind::kInsufficientData, "cannot accumulate stats of empty features");
  const RowMatrix post = Posteriors(eval, features);
  BwStats stats;
  stats.frames = features.rows();
  stats.n = post.colwise().sum().transpose();
  stats.e.noalias() = post.transpose() * features;
  for (int i = 0; i < stats.NumComponents(); ++i) {
    if (stats.IsObserved(i))
      stats.e.row(i) /= stats.n(i);
    else
      stats.e.row(i) = ubm.means.row(i);
  }
  return stats;
}

BwStats AccumulateBw(const Gmm &ubm, const FeatureMatrix &features) {
  return AccumulateBw(GmmEvaluator(ubm), ubm, features);
}

Nbs NormalizeZeroth(const BwStats &stats) {
  if (stats.frames < 1)
    throw Error(ErrorKind::kInsufficientData, "cannot normalize stats of zero frames");
  return Nbs{stats.n / static_cast<double>(stats.frames)};
}

double L1Dissimilarity(const Vector &a, const Vector &b) {
  return (a - b).cwiseAbs().sum();
}

double Quality(const Nbs &nbs, const Gmm &ubm, const NbsDissimilarity &metric) {
  if (nbs.values.size() != ubm.weights.size()) {
    std::ostringstream msg;
    msg << "nbs has " << nbs.values.size() << " components, ubm has "
        << ubm.weights.size();
    throw Error(ErrorKind::kDimensionMismatch, msg.str());
  }
  return metric(nbs.values, ubm.weights);
}

NbsPopulation NbsPopulationStats(std::span<const Nbs> nbs_set, std::string label) {
  if (nbs_set.empty())
    throw Error(ErrorKind::kInsufficientData, "empty nbs set");
  const Eigen::Index k = nbs_set.front().values.size();
  NbsPopulation pop;
  pop.label = std::move(label);
  pop.count = nbs_set.size();
  pop.mean = Vector::Zero(k);
  for (const Nbs &n : nbs_set) {
    if (n.values.size() != k)
      throw Error(ErrorKind::kDimensionMismatch, "nbs vectors differ in length");
    pop.mean += n.values;
  }
  pop.mean /= static_cast<double>(nbs_set.size());
  pop.stddev = Vector::Zero(k);
  if (nbs_set.size() > 1) {
    for (const Nbs &n : nbs_set) pop.stddev += (n.values - pop.mean).cwiseAbs2();
    pop.stddev = (pop.stddev / static_cast<double>(nbs_set.size() - 1)).cwiseSqrt();
  }
  return pop;
}

PcaProjection PcaProject(std::span<const Nbs> nbs_set, int n_components) {
  if (nbs_set.size() < 2)
    throw Error(ErrorKind::kInsufficientData, "pca needs at least two nbs vectors");
  const Eigen::Index k = nbs_set.front().values.size();
  if (n_components < 1 || n_components > k)
    throw Error(ErrorKind::kInvalidArgument, "invalid number of principal components");
  RowMatrix x(nbs_set.size(), k);
  for (std::size_t r = 0; r < nbs_set.size(); ++r) {
    if (nbs_set[r].values.size() != k)
      throw Error(ErrorKind::kDimensionMismatch, "nbs vectors differ in length");
    x.row(r) = nbs_set[r].values.transpose();
  }
  PcaProjection out;
  out.center = x.colwise().mean().transpose();
  x.rowwise() -= out.center.transpose();
  const Eigen::MatrixXd cov =
      (x.transpose() * x) / static_cast<double>(nbs_set.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "pca eigendecomposition failed");
  out.basis.resize(k, n_components);
  out.eigenvalues.resize(n_components);
  for (int c = 0; c < n_components; ++c) {
    const Eigen::Index src = k - 1 - c;  // eigenvalues come ascending
    Vector v = eig.eigenvectors().col(src);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (std::abs(v(j)) > 1e-12) {
        if (v(j) < 0) v = -v;
        break;
      }
    }
    out.basis.col(c) = v;
    out.eigenvalues(c) = eig.eigenvalues()(src);
  }
  out.points = x * out.basis;
  return out;
}

}  // namespace asvq
