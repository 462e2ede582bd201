// core/include/asvq/synth.h

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

#ifndef ASVQ_SYNTH_H_
#define ASVQ_SYNTH_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "asvq/common.h"
#include "asvq/features.h"
#include "asvq/gmm.h"
#include "asvq/parallel.h"

namespace asvq {

/// Synthetic corpus parameters.  Speakers differ from the generator UBM by
/// Gaussian offsets of every component mean; an optional smaller offset per
/// utterance models session variability.  A nonzero rank confines the
/// corresponding offsets to a random subspace of the K*d mean supervector
/// (loadings scaled so each coordinate keeps variance scale^2); rank 0
/// draws every coordinate independently.
struct SynthConfig {
  int n_speakers = 50;
  int utts_per_speaker = 4;
  int frames_per_utt = 6000;
  int num_components = 64;
  int dim = 12;
  double speaker_shift_scale = 0.1;
  double session_shift_scale = 0.0;
  int speaker_rank = 40;
  int session_rank = 0;
  double mean_run_length = 1.0;  // frames per component visit; 1 gives iid
  // Each utterance replaces a fraction f = noise_fraction_max * u^noise_skew,
  // u ~ U[0, 1], of its frames with draws from a speaker-independent noise
  // GMM, imitating non-speech that survives SAD.  A large skew keeps most
  // utterances nearly clean and degrades a minority heavily.
  double noise_fraction_max = 0.8;
  double noise_skew = 3.0;
  int noise_components = 2;
  std::uint64_t seed = 1;

  void Validate() const;
};

struct Utterance {
  std::string id;
  std::string speaker;
  FeatureMatrix features;
};

struct SynthCorpus {
  std::vector<Utterance> utterances;  // speaker-major order
  Gmm generator_ubm;
  std::vector<RowMatrix> speaker_means;  // one K x d block per speaker
  RowMatrix speaker_loadings;  // K*d x speaker_rank, empty for full rank
  RowMatrix session_loadings;  // K*d x session_rank, empty for full rank
  Gmm noise_gmm;               // empty when noise_fraction_max == 0
};

/// Random diagonal GMM used as a generator: weights from normalized
/// Gamma(2) draws, means N(0, 4), variances uniform in [0.5, 1.5].
Gmm RandomGmm(int num_components, int dim, std::mt19937_64 &rng);

/// Ancestral sampling of n frames from a diagonal GMM.  With
/// mean_run_length L > 1 the component sequence is a sticky Markov chain:
/// each frame keeps the previous component with probability 1 - 1/L and
/// otherwise redraws from the weights, so the stationary occupancy is still
/// the weight vector while short segments cover fewer components.
FeatureMatrix SampleFrames(const Gmm &gmm, int n_frames, std::mt19937_64 &rng,
                           double mean_run_length = 1.0);

/// Builds a corpus fully determined by cfg.seed.  Utterance u draws from
/// its own derived seed so the parallel schedule never changes the output.
SynthCorpus SynthCorpusFromConfig(const SynthConfig &cfg,
                                  const Parallelism &par = {});

struct DurationCondition {
  int frames = 0;
  std::string label;  // e.g. "200"
  std::vector<Utterance> utterances;
};

/// Truncates every utterance to each duration.  Throws kInsufficientData
/// listing every utterance that is too short.
std::vector<DurationCondition> MakeDurationConditions(
    std::span<const Utterance> utterances, std::span<const int> durations,
    TruncationMode mode, std::uint64_t seed);

}  // namespace asvq

#endif  // ASVQ_SYNTH_H_
