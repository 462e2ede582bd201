// core/src/features.cc

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

#include "asvq/features.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace asvq {

namespace {

constexpr double kLogFloor = 1e-10;

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// n_filters x (fft_size/2 + 1) triangular weights on the mel scale.
RowMatrix MelFilterbank(const FrontendConfig &cfg, int sample_rate,
                        int fft_size) {
  const int n_bins = fft_size / 2 + 1;
  const double nyquist = 0.5 * sample_rate;
  const double high = std::min(cfg.high_freq <= 0 ? nyquist : cfg.high_freq,
                               nyquist);
  const double mel_low = HzToMel(cfg.low_freq), mel_high = HzToMel(high);
  const double mel_step = (mel_high - mel_low) / (cfg.n_mel_filters + 1);
  RowMatrix bank = RowMatrix::Zero(cfg.n_mel_filters, n_bins);
  for (int m = 0; m < cfg.n_mel_filters; ++m) {
    const double left = mel_low + m * mel_step;
    const double center = left + mel_step;
    const double right = center + mel_step;
    for (int k = 0; k < n_bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate / fft_size);
      if (mel > left && mel < right) {
        bank(m, k) = mel <= center ? (mel - left) / (center - left)
                                   : (right - mel) / (right - center);
      }
    }
  }
  return bank;
}

void CheckAudio(const AudioBuffer &audio) {
  if (audio.sample_rate <= 0)
    throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
}

}  // namespace

void FrontendConfig::Validate() const {
  auto fail = [](const std::string &msg) {
    throw Error(ErrorKind::kInvalidArgument, "frontend config: " + msg);
  };
  if (!(hop_ms > 0)) fail("hop_ms must be positive");
  if (!(window_ms >= hop_ms)) fail("window_ms must be >= hop_ms");
  if (n_cepstra < 1) fail("n_cepstra must be >= 1");
  if (n_mel_filters < n_cepstra + 1)
    fail("n_mel_filters must exceed n_cepstra");
  if (!(sad_threshold_db > 0)) fail("sad_threshold_db must be positive");
  if (delta_window < 1) fail("delta_window must be >= 1");
  if (low_freq < 0 || (high_freq > 0 && high_freq <= low_freq))
    fail("invalid filterbank frequency range");
  if (!(cmvn_variance_floor > 0)) fail("cmvn_variance_floor must be positive");
}

int FrameLength(const FrontendConfig &cfg, int sample_rate) {
  return static_cast<int>(std::lround(cfg.window_ms * sample_rate / 1000.0));
}

int FrameShift(const FrontendConfig &cfg, int sample_rate) {
  return static_cast<int>(std::lround(cfg.hop_ms * sample_rate / 1000.0));
}

int NumFrames(std::size_t n_samples, const FrontendConfig &cfg,
              int sample_rate) {
  const std::size_t len = FrameLength(cfg, sample_rate);
  const std::size_t shift = FrameShift(cfg, sample_rate);
  if (n_samples < len || len == 0 || shift == 0) return 0;
  return static_cast<int>(1 + (n_samples - len) / shift);
}

FeatureMatrix ComputeMfcc(const AudioBuffer &audio, const FrontendConfig &cfg) {
  cfg.Validate();
  CheckAudio(audio);
  const int len = FrameLength(cfg, audio.sample_rate);
  const int shift = FrameShift(cfg, audio.sample_rate);
  const int n_frames = NumFrames(audio.samples.size(), cfg, audio.sample_rate);
  if (n_frames == 0) {
    std::ostringstream msg;
    msg << "audio too short: " << audio.samples.size()
        << " samples, need at least " << len << " for one window";
    throw Error(ErrorKind::kInsufficientData, msg.str());
  }
  const int fft_size = NextPowerOfTwo(len);
  const int n_bins = fft_size / 2 + 1;
  const RowMatrix bank = MelFilterbank(cfg, audio.sample_rate, fft_size);

  std::vector<double> window(len);
  for (int i = 0; i < len; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (len - 1));

  const int n_mel = cfg.n_mel_filters;
  RowMatrix dct(cfg.n_cepstra, n_mel);
  for (int j = 0; j < cfg.n_cepstra; ++j)
    for (int m = 0; m < n_mel; ++m)
      dct(j, m) = std::sqrt(2.0 / n_mel) *
                  std::cos(std::numbers::pi * (j + 1) * (m + 0.5) / n_mel);

  Eigen::FFT<double> fft;
  std::vector<double> frame(fft_size, 0.0);
  std::vector<std::complex<double>> spectrum;
  Vector power(n_bins), log_mel(n_mel);
  FeatureMatrix out(n_frames, cfg.n_cepstra);
  for (int t = 0; t < n_frames; ++t) {
    const std::int16_t *src = audio.samples.data() + static_cast<std::size_t>(t) * shift;
    for (int i = 0; i < len; ++i) frame[i] = window[i] * src[i];
    fft.fwd(spectrum, frame);
    for (int k = 0; k < n_bins; ++k) power(k) = std::norm(spectrum[k]);
    log_mel = (bank * power).array().max(kLogFloor).log();
    out.row(t) = (dct * log_mel).transpose();
  }
  return out;
}

std::vector<double> FrameLogEnergy(const AudioBuffer &audio,
                                   const FrontendConfig &cfg) {
  CheckAudio(audio);
  const int len = FrameLength(cfg, audio.sample_rate);
  const int shift = FrameShift(cfg, audio.sample_rate);
  const int n_frames = NumFrames(audio.samples.size(), cfg, audio.sample_rate);
  std::vector<double> energy(n_frames);
  for (int t = 0; t < n_frames; ++t) {
    double sum = 0.0;
    const std::int16_t *src = audio.samples.data() + static_cast<std::size_t>(t) * shift;
    for (int i = 0; i < len; ++i) sum += static_cast<double>(src[i]) * src[i];
    energy[t] = sum > 0 ? 10.0 * std::log10(sum)
                        : -std::numeric_limits<double>::infinity();
  }
  return energy;
}

std::vector<bool> EnergySad(const AudioBuffer &audio, const FrontendConfig &cfg) {
  cfg.Validate();
  const std::vector<double> energy = FrameLogEnergy(audio, cfg);
  double peak = -std::numeric_limits<double>::infinity();
  for (double e : energy) peak = std::max(peak, e);
  std::vector<bool> mask(energy.size(), false);
  if (!std::isfinite(peak)) return mask;
  const double threshold = peak - cfg.sad_threshold_db;
  for (std::size_t t = 0; t < energy.size(); ++t) mask[t] = energy[t] > threshold;
  return mask;
}

FeatureMatrix SelectFrames(const FeatureMatrix &features,
                           const std::vector<bool> &mask) {
  if (static_cast<Eigen::Index>(mask.size()) != features.rows())
    throw Error(ErrorKind::kDimensionMismatch,
                "frame mask length does not match frame count");
  const auto kept = std::count(mask.begin(), mask.end(), true);
  FeatureMatrix out(kept, features.cols());
  Eigen::Index r = 0;
  for (std::size_t t = 0; t < mask.size(); ++t)
    if (mask[t]) out.row(r++) = features.row(t);
  return out;
}

namespace {

FeatureMatrix Delta(const FeatureMatrix &in, int window) {
  const Eigen::Index n = in.rows();
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += 2.0 * k * k;
  FeatureMatrix out = FeatureMatrix::Zero(n, in.cols());
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int k = 1; k <= window; ++k) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + k, n - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - k, 0);
      out.row(t) += k * (in.row(ahead) - in.row(behind));
    }
  }
  return out / denom;
}

}  // namespace

FeatureMatrix AppendDeltas(const FeatureMatrix &features, int delta_window) {
  if (features.rows() == 0 || features.cols() == 0)
    throw Error(ErrorKind::kInsufficientData, "cannot append deltas to empty features");
  if (delta_window < 1)
    throw Error(ErrorKind::kInvalidArgument, "delta window must be >= 1");
  const Eigen::Index d = features.cols();
  const FeatureMatrix delta = Delta(features, delta_window);
  FeatureMatrix out(features.rows(), 3 * d);
  out.leftCols(d) = features;
  out.middleCols(d, d) = delta;
  out.rightCols(d) = Delta(delta, delta_window);
  return out;
}

FeatureMatrix Cmvn(const FeatureMatrix &features, double variance_floor) {
  if (features.rows() == 0)
    throw Error(ErrorKind::kInsufficientData, "cmvn needs at least one frame");
  const double n = static_cast<double>(features.rows());
  const Eigen::RowVectorXd mean = features.colwise().sum() / n;
  FeatureMatrix out = features.rowwise() - mean;
  const Eigen::RowVectorXd var = out.array().square().colwise().sum() / n;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (var(j) < variance_floor)
      out.col(j).setZero();
    else
      out.col(j) /= std::sqrt(var(j));
  }
  return out;
}

FeatureMatrix ExtractFeatures(const AudioBuffer &audio,
                              const FrontendConfig &cfg) {
  const FeatureMatrix mfcc = ComputeMfcc(audio, cfg);
  const FeatureMatrix active = SelectFrames(mfcc, EnergySad(audio, cfg));
  if (active.rows() == 0) return FeatureMatrix(0, 3 * mfcc.cols());
  return Cmvn(AppendDeltas(active, cfg.delta_window), cfg.cmvn_variance_floor);
}

FeatureMatrix TruncateActive(const FeatureMatrix &features, int n,
                             TruncationMode mode, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "truncation length must be >= 1");
  const Eigen::Index available = features.rows();
  Eigen::Index start = 0;
  if (mode == TruncationMode::kEvalSkip500) {
    const Eigen::Index needed = kEvalSkipFrames + static_cast<Eigen::Index>(n);
    if (needed > available) {
      std::ostringstream msg;
      msg << "insufficient frames: need " << needed << " (" << kEvalSkipFrames
          << " skipped + " << n << "), have " << available << ", short by "
          << needed - available;
      throw Error(ErrorKind::kInsufficientData, msg.str());
    }
    start = kEvalSkipFrames;
  } else {
    if (n > available) {
      std::ostringstream msg;
      msg << "insufficient frames: need " << n << ", have " << available
          << ", short by " << n - available;
      throw Error(ErrorKind::kInsufficientData, msg.str());
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, available - n);
    start = pick(rng);
  }
  return features.middleRows(start, n);
}

}  // namespace asvq
