// core/src/gmm.cc

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

#include "asvq/gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

#include "asvq/bw_stats.h"

namespace asvq {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)
constexpr double kDeadComponentMass = 1e-6;
constexpr double kReseedWeight = 1e-8;
constexpr Eigen::Index kChunkFrames = 4096;
constexpr Eigen::Index kMaxKmeansFrames = 200000;
constexpr std::size_t kWorstFramesKept = 8;

void CheckDim(const Gmm &gmm, Eigen::Index dim) {
  if (dim != gmm.Dim()) {
    std::ostringstream msg;
    msg << "feature dim " << dim << " does not match model dim " << gmm.Dim();
    throw Error(ErrorKind::kDimensionMismatch, msg.str());
  }
}

double RowLogSumExp(const RowMatrix &m, Eigen::Index r) {
  return LogSumExp(m.row(r).data(), static_cast<std::size_t>(m.cols()));
}

}  // namespace

void Gmm::Validate() const {
  const Eigen::Index k = weights.size();
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "gmm has no components");
  if (means.rows() != k || variances.rows() != k ||
      variances.cols() != means.cols() || means.cols() == 0)
    throw Error(ErrorKind::kDimensionMismatch, "gmm parameter shapes disagree");
  if ((weights.array() < 0).any() || !weights.allFinite())
    throw Error(ErrorKind::kInvalidArgument, "gmm weights must be finite and >= 0");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw Error(ErrorKind::kInvalidArgument, "gmm weights do not sum to 1");
  if (!means.allFinite())
    throw Error(ErrorKind::kInvalidArgument, "gmm means must be finite");
  if (!variances.allFinite() || (variances.array() <= 0).any())
    throw Error(ErrorKind::kInvalidArgument, "gmm variances must be positive");
}

ComponentDensities LogDensity(const Gmm &gmm, const Vector &x) {
  CheckDim(gmm, x.size());
  const int k = gmm.NumComponents();
  ComponentDensities out;
  out.log_component.resize(k);
  Vector weighted(k);
  for (int i = 0; i < k; ++i) {
    double quad = 0.0, log_det = 0.0;
    for (int j = 0; j < gmm.Dim(); ++j) {
      const double diff = x(j) - gmm.means(i, j);
      quad += diff * diff / gmm.variances(i, j);
      log_det += std::log(gmm.variances(i, j));
    }
    out.log_component(i) = -0.5 * (gmm.Dim() * kLog2Pi + log_det + quad);
    weighted(i) = std::log(gmm.weights(i)) + out.log_component(i);
  }
  out.log_total = LogSumExp(weighted);
  return out;
}

GmmEvaluator::GmmEvaluator(const Gmm &gmm) {
  gmm.Validate();
  inv_var_ = gmm.variances.cwiseInverse();
  mean_invvar_ = gmm.means.cwiseProduct(inv_var_);
  const int k = gmm.NumComponents();
  gconst_.resize(k);
  for (int i = 0; i < k; ++i) {
    gconst_(i) = std::log(gmm.weights(i)) -
                 0.5 * (gmm.Dim() * kLog2Pi +
                        gmm.variances.row(i).array().log().sum() +
                        gmm.means.row(i).dot(mean_invvar_.row(i)));
  }
}

RowMatrix GmmEvaluator::WeightedLogLikes(const FeatureMatrix &features) const {
  if (features.cols() != Dim()) {
    std::ostringstream msg;
    msg << "feature dim " << features.cols() << " does not match model dim "
        << Dim();
    throw Error(ErrorKind::kDimensionMismatch, msg.str());
  }
  RowMatrix out = features * mean_invvar_.transpose();
  out.noalias() -= 0.5 * features.array().square().matrix() * inv_var_.transpose();
  out.rowwise() += gconst_.transpose();
  return out;
}

RowMatrix Posteriors(const GmmEvaluator &eval, const FeatureMatrix &features,
                     double *total_log_like) {
  RowMatrix post = eval.WeightedLogLikes(features);
  double total = 0.0;
  for (Eigen::Index t = 0; t < post.rows(); ++t) {
    const double lse = RowLogSumExp(post, t);
    total += lse;
    post.row(t) = (post.row(t).array() - lse).exp();
  }
  if (total_log_like) *total_log_like = total;
  return post;
}

RowMatrix Posteriors(const Gmm &gmm, const FeatureMatrix &features,
                     double *total_log_like) {
  return Posteriors(GmmEvaluator(gmm), features, total_log_like);
}

namespace {

double SumLogLike(const GmmEvaluator &eval, const FeatureMatrix &features) {
  double total = 0.0;
  for (Eigen::Index start = 0; start < features.rows(); start += kChunkFrames) {
    const Eigen::Index len = std::min(kChunkFrames, features.rows() - start);
    const RowMatrix ll = eval.WeightedLogLikes(features.middleRows(start, len));
    for (Eigen::Index t = 0; t < len; ++t) total += RowLogSumExp(ll, t);
  }
  return total;
}

struct Chunk {
  std::size_t utt;
  Eigen::Index start;
  Eigen::Index len;
};

std::vector<Chunk> MakeChunks(std::span<const FeatureMatrix> corpus) {
  std::vector<Chunk> chunks;
  for (std::size_t u = 0; u < corpus.size(); ++u)
    for (Eigen::Index s = 0; s < corpus[u].rows(); s += kChunkFrames)
      chunks.push_back({u, s, std::min(kChunkFrames, corpus[u].rows() - s)});
  return chunks;
}

// A frame location with its log-likelihood, ordered worst first.
struct FrameFit {
  double log_like;
  std::size_t utt;
  Eigen::Index frame;
  bool operator<(const FrameFit &o) const {
    return std::tie(log_like, utt, frame) < std::tie(o.log_like, o.utt, o.frame);
  }
};

struct EmAccum {
  Vector occ;
  RowMatrix sum_x, sum_x2;
  double log_like = 0.0;
  std::vector<FrameFit> worst;

  EmAccum(int k, int d)
      : occ(Vector::Zero(k)), sum_x(RowMatrix::Zero(k, d)),
        sum_x2(RowMatrix::Zero(k, d)) {}

  void KeepWorst(const FrameFit &fit) {
    if (worst.size() < kWorstFramesKept) {
      worst.insert(std::upper_bound(worst.begin(), worst.end(), fit), fit);
    } else if (fit < worst.back()) {
      worst.pop_back();
      worst.insert(std::upper_bound(worst.begin(), worst.end(), fit), fit);
    }
  }

  EmAccum &operator+=(const EmAccum &o) {
    occ += o.occ;
    sum_x += o.sum_x;
    sum_x2 += o.sum_x2;
    log_like += o.log_like;
    for (const FrameFit &f : o.worst) KeepWorst(f);
    return *this;
  }
};

EmAccum EStep(const Gmm &gmm, std::span<const FeatureMatrix> corpus,
              const std::vector<Chunk> &chunks, const Parallelism &par) {
  const GmmEvaluator eval(gmm);
  const EmAccum zero(gmm.NumComponents(), gmm.Dim());
  return ParallelReduce(chunks.size(), par, zero, [&](EmAccum &acc, std::size_t c) {
    const Chunk &ch = chunks[c];
    const auto x = corpus[ch.utt].middleRows(ch.start, ch.len);
    RowMatrix post = eval.WeightedLogLikes(x);
    for (Eigen::Index t = 0; t < ch.len; ++t) {
      const double lse = RowLogSumExp(post, t);
      acc.log_like += lse;
      acc.KeepWorst({lse, ch.utt, ch.start + t});
      post.row(t) = (post.row(t).array() - lse).exp();
    }
    acc.occ += post.colwise().sum().transpose();
    acc.sum_x.noalias() += post.transpose() * x;
    acc.sum_x2.noalias() += post.transpose() * x.array().square().matrix();
  });
}

// Frames used for k-means seeding: every frame, or an even stride through
// the corpus when it is large.
FeatureMatrix KmeansFrames(std::span<const FeatureMatrix> corpus,
                           Eigen::Index total) {
  const Eigen::Index stride = std::max<Eigen::Index>(1, (total + kMaxKmeansFrames - 1) / kMaxKmeansFrames);
  const Eigen::Index d = corpus.front().cols();
  FeatureMatrix out((total + stride - 1) / stride, d);
  Eigen::Index global = 0, r = 0;
  for (const FeatureMatrix &m : corpus) {
    for (Eigen::Index t = 0; t < m.rows(); ++t, ++global)
      if (global % stride == 0) out.row(r++) = m.row(t);
  }
  return out.topRows(r);
}

// Squared distances of every frame to every centroid, frames x K.
RowMatrix SquaredDistances(const FeatureMatrix &x, const RowMatrix &centroids) {
  RowMatrix dist = -2.0 * x * centroids.transpose();
  dist.colwise() += x.rowwise().squaredNorm();
  dist.rowwise() += centroids.rowwise().squaredNorm().transpose();
  return dist.cwiseMax(0.0);
}

RowMatrix KmeansPlusPlus(const FeatureMatrix &x, int k, std::mt19937_64 &rng) {
  const Eigen::Index n = x.rows();
  RowMatrix centroids(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = x.row(first(rng));
  Vector best = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = best.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      double target = unit(rng) * total, acc = 0.0;
      for (pick = 0; pick < n - 1; ++pick) {
        acc += best(pick);
        if (acc > target) break;
      }
    } else {
      pick = first(rng);
    }
    centroids.row(c) = x.row(pick);
    best = best.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

Gmm KmeansInit(const FeatureMatrix &x, int k, const EmConfig &cfg,
               const Eigen::RowVectorXd &var_floor,
               const Eigen::RowVectorXd &global_var) {
  std::mt19937_64 rng(cfg.seed);
  RowMatrix centroids = KmeansPlusPlus(x, k, rng);
  std::vector<int> assign(x.rows(), 0);
  auto assign_all = [&]() {
    const RowMatrix dist = SquaredDistances(x, centroids);
    Vector nearest(x.rows());
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      Eigen::Index arg;
      nearest(t) = dist.row(t).minCoeff(&arg);
      assign[t] = static_cast<int>(arg);
    }
    return nearest;
  };
  for (int iter = 0; iter < cfg.kmeans_init_iters; ++iter) {
    const Vector nearest = assign_all();
    RowMatrix sums = RowMatrix::Zero(k, x.cols());
    std::vector<Eigen::Index> counts(k, 0);
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      sums.row(assign[t]) += x.row(t);
      ++counts[assign[t]];
    }
    Vector far = nearest;
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      } else {
        Eigen::Index arg;
        far.maxCoeff(&arg);
        centroids.row(c) = x.row(arg);
        far(arg) = 0.0;
      }
    }
  }
  assign_all();

  Gmm gmm;
  gmm.weights = Vector::Zero(k);
  gmm.means = centroids;
  gmm.variances = RowMatrix::Zero(k, x.cols());
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    gmm.weights(assign[t]) += 1.0;
    gmm.variances.row(assign[t]) +=
        (x.row(t) - centroids.row(assign[t])).array().square().matrix();
  }
  for (int c = 0; c < k; ++c) {
    if (gmm.weights(c) > 1)
      gmm.variances.row(c) = (gmm.variances.row(c) / gmm.weights(c)).cwiseMax(var_floor);
    else
      gmm.variances.row(c) = global_var.cwiseMax(var_floor);
    gmm.weights(c) = std::max(gmm.weights(c), 1.0);
  }
  gmm.weights /= gmm.weights.sum();
  return gmm;
}

}  // namespace

double TotalLogLikelihood(const Gmm &gmm, const FeatureMatrix &features) {
  return SumLogLike(GmmEvaluator(gmm), features);
}

Gmm TrainUbm(std::span<const FeatureMatrix> corpus, int num_components,
             const EmConfig &cfg, EmTrace *trace) {
  if (corpus.empty())
    throw Error(ErrorKind::kInsufficientData, "empty training corpus");
  if (num_components < 1)
    throw Error(ErrorKind::kInvalidArgument, "component count must be >= 1");
  if (cfg.n_iters < 1 || !(cfg.variance_floor > 0))
    throw Error(ErrorKind::kInvalidArgument, "em config: n_iters >= 1 and variance_floor > 0 required");
  const Eigen::Index d = corpus.front().cols();
  Eigen::Index total = 0;
  for (const FeatureMatrix &m : corpus) {
    if (m.cols() != d)
      throw Error(ErrorKind::kDimensionMismatch, "corpus utterances differ in feature dim");
    if (!m.allFinite())
      throw Error(ErrorKind::kInvalidArgument, "corpus contains non-finite features");
    total += m.rows();
  }
  if (total < num_components) {
    std::ostringstream msg;
    msg << "insufficient data: " << total << " frames for " << num_components
        << " components";
    throw Error(ErrorKind::kInsufficientData, msg.str());
  }

  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
  for (const FeatureMatrix &m : corpus) sum += m.colwise().sum();
  const Eigen::RowVectorXd global_mean = sum / static_cast<double>(total);
  Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(d);
  for (const FeatureMatrix &m : corpus)
    sq += (m.rowwise() - global_mean).array().square().matrix().colwise().sum();
  const Eigen::RowVectorXd global_var = sq / static_cast<double>(total);
  // Floor relative to the data scale, with an absolute backstop for
  // constant dimensions.
  const Eigen::RowVectorXd var_floor =
      (cfg.variance_floor * global_var).cwiseMax(1e-10);

  Gmm gmm = KmeansInit(KmeansFrames(corpus, total), num_components, cfg,
                       var_floor, global_var);
  const std::vector<Chunk> chunks = MakeChunks(corpus);
  if (trace) trace->objective.clear();

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.n_iters; ++iter) {
    const EmAccum acc = EStep(gmm, corpus, chunks, cfg.parallel);
    if (trace) trace->objective.push_back(acc.log_like);
    if (cfg.convergence_tol > 0 && std::isfinite(prev_ll) &&
        std::abs(acc.log_like - prev_ll) <= cfg.convergence_tol * std::abs(prev_ll))
      return gmm;
    prev_ll = acc.log_like;

    std::size_t next_worst = 0;
    for (int i = 0; i < num_components; ++i) {
      if (acc.occ(i) < kDeadComponentMass) {
        const FrameFit &fit = acc.worst[next_worst % acc.worst.size()];
        ++next_worst;
        gmm.means.row(i) = corpus[fit.utt].row(fit.frame);
        gmm.variances.row(i) = global_var.cwiseMax(var_floor);
        gmm.weights(i) = kReseedWeight;
        continue;
      }
      gmm.weights(i) = acc.occ(i) / static_cast<double>(total);
      gmm.means.row(i) = acc.sum_x.row(i) / acc.occ(i);
      gmm.variances.row(i) =
          (acc.sum_x2.row(i) / acc.occ(i) -
           gmm.means.row(i).array().square().matrix())
              .cwiseMax(var_floor);
    }
    gmm.weights /= gmm.weights.sum();
  }
  if (trace)
    trace->objective.push_back(EStep(gmm, corpus, chunks, cfg.parallel).log_like);
  return gmm;
}

Gmm MapAdaptMeans(const Gmm &ubm, const BwStats &stats, double relevance) {
  if (!(relevance > 0))
    throw Error(ErrorKind::kInvalidArgument, "relevance factor must be positive");
  if (stats.NumComponents() != ubm.NumComponents() || stats.Dim() != ubm.Dim() ||
      stats.e.rows() != stats.n.size()) {
    std::ostringstream msg;
    msg << "stats (" << stats.NumComponents() << "x" << stats.Dim()
        << ") do not match ubm (" << ubm.NumComponents() << "x" << ubm.Dim() << ")";
    throw Error(ErrorKind::kDimensionMismatch, msg.str());
  }
  Gmm adapted = ubm;
  for (int i = 0; i < ubm.NumComponents(); ++i) {
    if (!stats.IsObserved(i)) continue;
    const double a = stats.n(i) / (stats.n(i) + relevance);
    adapted.means.row(i) = a * stats.e.row(i) + (1.0 - a) * ubm.means.row(i);
  }
  return adapted;
}

double ScoreGmmUbm(const Gmm &target, const Gmm &ubm, const FeatureMatrix &test,
                   LlrNormalization norm) {
  if (test.rows() == 0)
    throw Error(ErrorKind::kInsufficientData, "empty test features");
  if (target.NumComponents() != ubm.NumComponents() || target.Dim() != ubm.Dim())
    throw Error(ErrorKind::kDimensionMismatch, "target and ubm shapes differ");
  CheckDim(ubm, test.cols());
  const double llr = SumLogLike(GmmEvaluator(target), test) -
                     SumLogLike(GmmEvaluator(ubm), test);
  return norm == LlrNormalization::kFrameAverage
             ? llr / static_cast<double>(test.rows())
             : llr;
}

}  // namespace asvq
