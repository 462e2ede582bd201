// core/src/synth.cc

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

#include "asvq/synth.h"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace asvq {

namespace {

constexpr std::uint64_t kUbmStream = 0;
constexpr std::uint64_t kSpeakerStream = 1;
constexpr std::uint64_t kUtteranceStream = 2;
constexpr std::uint64_t kSpeakerLoadingStream = 3;
constexpr std::uint64_t kSessionLoadingStream = 4;
constexpr std::uint64_t kNoiseStream = 5;

std::string SpeakerId(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%04d", s);
  return buf;
}

std::string UtteranceId(int s, int u) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "spk%04d_u%03d", s, u);
  return buf;
}

RowMatrix GaussianMatrix(Eigen::Index rows, Eigen::Index cols, double scale,
                         std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scale * normal(rng);
  return m;
}

RowMatrix Loadings(int sv_dim, int rank, std::uint64_t seed) {
  if (rank == 0) return {};
  std::mt19937_64 rng(seed);
  return GaussianMatrix(sv_dim, rank, 1.0 / std::sqrt(static_cast<double>(rank)), rng);
}

// scale-weighted offset of the K x d means, full rank or through loadings.
RowMatrix MeanOffset(int num_components, int dim, double scale,
                     const RowMatrix &loadings, std::mt19937_64 &rng) {
  if (loadings.size() == 0) return GaussianMatrix(num_components, dim, scale, rng);
  const RowMatrix z = GaussianMatrix(loadings.cols(), 1, scale, rng);
  const Vector sv = loadings * z.col(0);
  return Eigen::Map<const RowMatrix>(sv.data(), num_components, dim);
}

}  // namespace

void SynthConfig::Validate() const {
  if (n_speakers < 1 || utts_per_speaker < 1 || frames_per_utt < 1 ||
      num_components < 1 || dim < 1)
    throw Error(ErrorKind::kInvalidArgument, "synth config: all counts must be >= 1");
  if (!(speaker_shift_scale >= 0) || !(session_shift_scale >= 0))
    throw Error(ErrorKind::kInvalidArgument, "synth config: shift scales must be >= 0");
  const int sv_dim = num_components * dim;
  if (speaker_rank < 0 || speaker_rank > sv_dim || session_rank < 0 || session_rank > sv_dim)
    throw Error(ErrorKind::kInvalidArgument, "synth config: ranks must lie in [0, K*d]");
  if (!(mean_run_length >= 1.0))
    throw Error(ErrorKind::kInvalidArgument, "synth config: mean_run_length must be >= 1");
  if (!(noise_fraction_max >= 0.0 && noise_fraction_max <= 1.0))
    throw Error(ErrorKind::kInvalidArgument, "synth config: noise_fraction_max must lie in [0, 1]");
  if (!(noise_skew > 0.0))
    throw Error(ErrorKind::kInvalidArgument, "synth config: noise_skew must be positive");
  if (noise_components < 1)
    throw Error(ErrorKind::kInvalidArgument, "synth config: noise_components must be >= 1");
}

Gmm RandomGmm(int num_components, int dim, std::mt19937_64 &rng) {
  std::gamma_distribution<double> gamma(2.0, 1.0);
  std::uniform_real_distribution<double> var(0.5, 1.5);
  Gmm gmm;
  gmm.weights.resize(num_components);
  for (int i = 0; i < num_components; ++i) gmm.weights(i) = gamma(rng);
  gmm.weights /= gmm.weights.sum();
  gmm.means = GaussianMatrix(num_components, dim, 2.0, rng);
  gmm.variances.resize(num_components, dim);
  for (int i = 0; i < num_components; ++i)
    for (int j = 0; j < dim; ++j) gmm.variances(i, j) = var(rng);
  return gmm;
}

FeatureMatrix SampleFrames(const Gmm &gmm, int n_frames, std::mt19937_64 &rng,
                           double mean_run_length) {
  if (!(mean_run_length >= 1.0))
    throw Error(ErrorKind::kInvalidArgument, "mean_run_length must be >= 1");
  std::discrete_distribution<int> pick(gmm.weights.data(),
                                       gmm.weights.data() + gmm.weights.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution switch_component(1.0 / mean_run_length);
  const RowMatrix stddev = gmm.variances.cwiseSqrt();
  FeatureMatrix x(n_frames, gmm.Dim());
  int i = 0;
  for (int t = 0; t < n_frames; ++t) {
    if (t == 0 || switch_component(rng)) i = pick(rng);
    for (int j = 0; j < gmm.Dim(); ++j)
      x(t, j) = gmm.means(i, j) + stddev(i, j) * normal(rng);
  }
  return x;
}

SynthCorpus SynthCorpusFromConfig(const SynthConfig &cfg, const Parallelism &par) {
  cfg.Validate();
  SynthCorpus corpus;
  std::mt19937_64 ubm_rng(DeriveSeed(cfg.seed, kUbmStream));
  corpus.generator_ubm = RandomGmm(cfg.num_components, cfg.dim, ubm_rng);

  const int sv_dim = cfg.num_components * cfg.dim;
  corpus.speaker_loadings =
      Loadings(sv_dim, cfg.speaker_rank, DeriveSeed(cfg.seed, kSpeakerLoadingStream));
  corpus.session_loadings =
      Loadings(sv_dim, cfg.session_rank, DeriveSeed(cfg.seed, kSessionLoadingStream));

  if (cfg.noise_fraction_max > 0) {
    std::mt19937_64 noise_rng(DeriveSeed(cfg.seed, kNoiseStream));
    corpus.noise_gmm = RandomGmm(cfg.noise_components, cfg.dim, noise_rng);
  }

  const std::uint64_t speaker_base = DeriveSeed(cfg.seed, kSpeakerStream);
  for (int s = 0; s < cfg.n_speakers; ++s) {
    std::mt19937_64 rng(DeriveSeed(speaker_base, s));
    corpus.speaker_means.push_back(
        corpus.generator_ubm.means + MeanOffset(cfg.num_components, cfg.dim,
                                                cfg.speaker_shift_scale,
                                                corpus.speaker_loadings, rng));
  }

  const std::size_t n_utts =
      static_cast<std::size_t>(cfg.n_speakers) * cfg.utts_per_speaker;
  corpus.utterances.resize(n_utts);
  const std::uint64_t utt_base = DeriveSeed(cfg.seed, kUtteranceStream);
  ParallelFor(n_utts, par, [&](std::size_t k) {
    const int s = static_cast<int>(k) / cfg.utts_per_speaker;
    const int u = static_cast<int>(k) % cfg.utts_per_speaker;
    std::mt19937_64 rng(DeriveSeed(utt_base, k));
    Gmm source = corpus.generator_ubm;
    source.means = corpus.speaker_means[s];
    if (cfg.session_shift_scale > 0)
      source.means += MeanOffset(cfg.num_components, cfg.dim, cfg.session_shift_scale,
                                 corpus.session_loadings, rng);
    Utterance &utt = corpus.utterances[k];
    utt.id = UtteranceId(s, u);
    utt.speaker = SpeakerId(s);
    utt.features = SampleFrames(source, cfg.frames_per_utt, rng, cfg.mean_run_length);
    if (cfg.noise_fraction_max > 0) {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double fraction = cfg.noise_fraction_max * std::pow(u, cfg.noise_skew);
      std::bernoulli_distribution is_noise(fraction);
      const FeatureMatrix noise = SampleFrames(corpus.noise_gmm, cfg.frames_per_utt, rng);
      for (int t = 0; t < cfg.frames_per_utt; ++t)
        if (is_noise(rng)) utt.features.row(t) = noise.row(t);
    }
  });
  return corpus;
}

std::vector<DurationCondition> MakeDurationConditions(
    std::span<const Utterance> utterances, std::span<const int> durations,
    TruncationMode mode, std::uint64_t seed) {
  std::vector<std::string> offending;
  std::vector<DurationCondition> out;
  for (std::size_t c = 0; c < durations.size(); ++c) {
    DurationCondition cond;
    cond.frames = durations[c];
    cond.label = std::to_string(durations[c]);
    const std::uint64_t cond_seed = DeriveSeed(seed, static_cast<std::uint64_t>(durations[c]));
    for (std::size_t u = 0; u < utterances.size(); ++u) {
      const Utterance &src = utterances[u];
      try {
        cond.utterances.push_back(
            {src.id, src.speaker,
             TruncateActive(src.features, durations[c], mode, DeriveSeed(cond_seed, u))});
      } catch (const Error &e) {
        if (e.kind() != ErrorKind::kInsufficientData) throw;
        offending.push_back(src.id + "@" + cond.label + " (" + e.what() + ")");
      }
    }
    out.push_back(std::move(cond));
  }
  if (!offending.empty()) {
    std::ostringstream msg;
    msg << offending.size() << " utterance(s) too short:";
    for (const std::string &o : offending) msg << ' ' << o;
    throw Error(ErrorKind::kInsufficientData, msg.str());
  }
  return out;
}

}  // namespace asvq
