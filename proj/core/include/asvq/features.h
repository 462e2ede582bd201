// core/include/asvq/features.h

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

#ifndef ASVQ_FEATURES_H_
#define ASVQ_FEATURES_H_

#include <cstdint>
#include <vector>

#include "asvq/common.h"

namespace asvq {

struct AudioBuffer {
  std::vector<std::int16_t> samples;
  int sample_rate = 8000;
};

/// Front-end settings.  Defaults give 19 static cepstra from a 20 ms Hamming
/// window with a 10 ms hop, 24 mel filters over 0-4000 Hz, a 30 dB energy
/// SAD and +-2 frame delta regression.
struct FrontendConfig {
  double window_ms = 20.0;
  double hop_ms = 10.0;
  int n_cepstra = 19;
  int n_mel_filters = 24;
  double low_freq = 0.0;
  double high_freq = 4000.0;  // clipped to Nyquist
  double sad_threshold_db = 30.0;
  int delta_window = 2;
  double cmvn_variance_floor = 1e-10;

  /// Throws Error(kInvalidArgument) when the settings are inconsistent.
  void Validate() const;
};

/// Window length and shift in samples for the given rate.
int FrameLength(const FrontendConfig &cfg, int sample_rate);
int FrameShift(const FrontendConfig &cfg, int sample_rate);
/// Number of complete windows that fit in n_samples (0 if none).
int NumFrames(std::size_t n_samples, const FrontendConfig &cfg,
              int sample_rate);

/// Static cepstra c1..c_n_cepstra per frame: Hamming window, power spectrum,
/// log mel filterbank energies, DCT-II.  Throws kInsufficientData when the
/// audio is shorter than one window.
FeatureMatrix ComputeMfcc(const AudioBuffer &audio, const FrontendConfig &cfg);

/// Per-frame log energy in dB (10 log10 of the sum of squared samples).
/// Frames of digital silence get -infinity.
std::vector<double> FrameLogEnergy(const AudioBuffer &audio,
                                   const FrontendConfig &cfg);

/// Frame activity mask, framed like ComputeMfcc.  A frame is active iff its
/// log energy exceeds the utterance peak minus cfg.sad_threshold_db.
/// Silent input yields an all-false mask.
std::vector<bool> EnergySad(const AudioBuffer &audio,
                            const FrontendConfig &cfg);

/// Keeps the rows whose mask entry is true.
FeatureMatrix SelectFrames(const FeatureMatrix &features,
                           const std::vector<bool> &mask);

/// Appends delta and delta-delta blocks computed by linear regression over
/// +-delta_window frames with edge replication.  Output dim is 3x input.
FeatureMatrix AppendDeltas(const FeatureMatrix &features, int delta_window);

/// Per-utterance mean and variance normalization of every column.  Columns
/// whose variance is below the floor become all zeros.
FeatureMatrix Cmvn(const FeatureMatrix &features,
                   double variance_floor = 1e-10);

/// Full front end: MFCC, SAD masking, deltas, CMVN over the active frames.
/// Returns an empty (0 x 3*n_cepstra) matrix when no frame is active.
FeatureMatrix ExtractFeatures(const AudioBuffer &audio,
                              const FrontendConfig &cfg);

enum class TruncationMode {
  kEvalSkip500,  // frames [500, 500 + n)
  kRandomStart,  // n consecutive frames from a seeded uniform start
};

/// Active frames skipped at the head of an utterance by kEvalSkip500.
inline constexpr int kEvalSkipFrames = 500;

/// Cuts an n-frame segment out of an utterance that holds active frames
/// only.  Throws kInsufficientData naming the shortfall when the utterance
/// is too short.
FeatureMatrix TruncateActive(const FeatureMatrix &features, int n,
                             TruncationMode mode, std::uint64_t seed);

}  // namespace asvq

#endif  // ASVQ_FEATURES_H_
