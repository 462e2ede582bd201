// core/src/ivector.cc

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

#include "asvq/ivector.h"

#include <cmath>
#include <random>
#include <sstream>

#include "linalg.h"

namespace asvq {

void TvModel::Validate() const {
  const Eigen::Index sv = static_cast<Eigen::Index>(num_components) * dim;
  if (num_components < 1 || dim < 1)
    throw Error(ErrorKind::kInvalidArgument, "tv model needs K >= 1 and d >= 1");
  if (m_bar.size() != sv || sigma.size() != sv || phi.rows() != sv)
    throw Error(ErrorKind::kDimensionMismatch, "tv model supervector sizes disagree");
  if (phi.cols() < 1)
    throw Error(ErrorKind::kInvalidArgument, "tv rank must be >= 1");
  if (!sigma.allFinite() || (sigma.array() <= 0).any())
    throw Error(ErrorKind::kInvalidArgument, "tv covariance must be positive");
  if (!phi.allFinite() || !m_bar.allFinite())
    throw Error(ErrorKind::kInvalidArgument, "tv model has non-finite entries");
}

IvectorExtractor::IvectorExtractor(const TvModel &tv) : tv_(tv) {
  tv_.Validate();
  const int d = tv_.dim, r = tv_.Rank();
  component_gram_.reserve(tv_.num_components);
  for (int i = 0; i < tv_.num_components; ++i) {
    const auto phi_i = tv_.phi.middleRows(i * d, d);
    const Vector inv_sigma = tv_.sigma.segment(i * d, d).cwiseInverse();
    RowMatrix gram(r, r);
    gram.noalias() = phi_i.transpose() * inv_sigma.asDiagonal() * phi_i;
    component_gram_.push_back(std::move(gram));
  }
}

void IvectorExtractor::CheckStats(const BwStats &stats) const {
  if (stats.NumComponents() != tv_.num_components || stats.Dim() != tv_.dim ||
      stats.e.rows() != stats.n.size()) {
    std::ostringstream msg;
    msg << "stats (" << stats.NumComponents() << "x" << stats.Dim()
        << ") do not match tv model (" << tv_.num_components << "x" << tv_.dim
        << ")";
    throw Error(ErrorKind::kDimensionMismatch, msg.str());
  }
}

Vector IvectorExtractor::Projection(const BwStats &stats) const {
  const int d = tv_.dim;
  Vector b = Vector::Zero(tv_.Rank());
  for (int i = 0; i < tv_.num_components; ++i) {
    if (stats.n(i) == 0.0) continue;
    const Vector centered =
        stats.e.row(i).transpose() - tv_.m_bar.segment(i * d, d);
    const Vector weighted =
        stats.n(i) * centered.cwiseQuotient(tv_.sigma.segment(i * d, d));
    b.noalias() += tv_.phi.middleRows(i * d, d).transpose() * weighted;
  }
  return b;
}

LatentPosterior IvectorExtractor::Posterior(const BwStats &stats) const {
  CheckStats(stats);
  const int r = tv_.Rank();
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(r, r);
  for (int i = 0; i < tv_.num_components; ++i)
    if (stats.n(i) != 0.0) precision += stats.n(i) * component_gram_[i];
  const auto llt = internal::SpdFactor(precision, "i-vector posterior precision");
  LatentPosterior post;
  post.mean = llt.solve(Projection(stats));
  post.precision = precision;
  return post;
}

IVector IvectorExtractor::Extract(const BwStats &stats, std::string id) const {
  return IVector{Posterior(stats).mean, std::move(id)};
}

double IvectorExtractor::MarginalLogLike(const BwStats &stats) const {
  const LatentPosterior post = Posterior(stats);
  const auto llt = internal::SpdFactor(post.precision, "i-vector posterior precision");
  return 0.5 * Projection(stats).dot(post.mean) - 0.5 * internal::LogDet(llt);
}

IVector ExtractIvector(const TvModel &tv, const BwStats &stats, std::string id) {
  return IvectorExtractor(tv).Extract(stats, std::move(id));
}

TvModel InitTvModel(const Gmm &ubm, int rank, std::uint64_t seed,
                    double init_scale) {
  ubm.Validate();
  const int k = ubm.NumComponents(), d = ubm.Dim();
  if (rank < 1 || rank > k * d) {
    std::ostringstream msg;
    msg << "tv rank " << rank << " must lie in [1, " << k * d << "]";
    throw Error(ErrorKind::kInvalidArgument, msg.str());
  }
  TvModel tv;
  tv.num_components = k;
  tv.dim = d;
  tv.m_bar = Eigen::Map<const Vector>(ubm.means.data(), k * d);
  tv.sigma = Eigen::Map<const Vector>(ubm.variances.data(), k * d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, init_scale);
  tv.phi.resize(k * d, rank);
  for (Eigen::Index r = 0; r < tv.phi.rows(); ++r)
    for (Eigen::Index c = 0; c < tv.phi.cols(); ++c) tv.phi(r, c) = normal(rng);
  return tv;
}

namespace {

struct TvAccum {
  std::vector<Eigen::MatrixXd> a;  // per component sum N_i (L^-1 + y y')
  RowMatrix c;                     // K*d x R, sum N_i (E_i - m_i) y'
  double objective = 0.0;

  TvAccum(int k, int d, int r)
      : a(k, Eigen::MatrixXd::Zero(r, r)), c(RowMatrix::Zero(k * d, r)) {}

  TvAccum &operator+=(const TvAccum &o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    c += o.c;
    objective += o.objective;
    return *this;
  }
};

}  // namespace

double TvObjective(const TvModel &tv, std::span<const BwStats> stats_set,
                   const Parallelism &par) {
  const IvectorExtractor extractor(tv);
  struct Sum {
    double v = 0.0;
    Sum &operator+=(const Sum &o) { v += o.v; return *this; }
  };
  return ParallelReduce(stats_set.size(), par, Sum{}, [&](Sum &acc, std::size_t u) {
           acc.v += extractor.MarginalLogLike(stats_set[u]);
         }).v;
}

TvModel TrainTv(const Gmm &ubm, std::span<const BwStats> stats_set,
                const TvConfig &cfg, EmTrace *trace) {
  if (stats_set.empty())
    throw Error(ErrorKind::kInsufficientData, "empty stats set for tv training");
  if (cfg.n_iters < 0)
    throw Error(ErrorKind::kInvalidArgument, "tv iterations must be >= 0");
  TvModel tv = InitTvModel(ubm, cfg.rank, cfg.seed, cfg.init_scale);
  const int k = tv.num_components, d = tv.dim, r = tv.Rank();
  if (trace) trace->objective.clear();

  for (int iter = 0; iter < cfg.n_iters; ++iter) {
    const IvectorExtractor extractor(tv);
    const TvAccum zero(k, d, r);
    const TvAccum acc = ParallelReduce(
        stats_set.size(), cfg.parallel, zero, [&](TvAccum &a, std::size_t u) {
          const BwStats &s = stats_set[u];
          const LatentPosterior post = extractor.Posterior(s);
          const auto llt =
              internal::SpdFactor(post.precision, "i-vector posterior precision");
          Eigen::MatrixXd second = llt.solve(Eigen::MatrixXd::Identity(r, r));
          second.noalias() += post.mean * post.mean.transpose();
          for (int i = 0; i < k; ++i) {
            if (s.n(i) == 0.0) continue;
            a.a[i].noalias() += s.n(i) * second;
            const Vector centered =
                s.e.row(i).transpose() - tv.m_bar.segment(i * d, d);
            a.c.middleRows(i * d, d).noalias() +=
                s.n(i) * centered * post.mean.transpose();
          }
          // b'y equals y'Ly at the posterior mean.
          a.objective += 0.5 * post.mean.dot(post.precision * post.mean) -
                         0.5 * internal::LogDet(llt);
        });
    if (trace) trace->objective.push_back(acc.objective);
    for (int i = 0; i < k; ++i) {
      const auto llt = internal::SpdFactor(acc.a[i], "tv m-step system");
      tv.phi.middleRows(i * d, d) =
          llt.solve(acc.c.middleRows(i * d, d).transpose()).transpose();
    }
  }
  if (trace) trace->objective.push_back(TvObjective(tv, stats_set, cfg.parallel));
  return tv;
}

IVector LengthNormalize(const IVector &ivec) {
  IVector out = ivec;
  const double norm = out.y.norm();
  if (norm > 0) out.y /= norm;
  return out;
}

}  // namespace asvq
