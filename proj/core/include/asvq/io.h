// core/include/asvq/io.h

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

// Readers and writers for every on-disk format.  Binary formats are
// little-endian regardless of host; malformed input raises Error(kFormat)
// with the byte offset (binary) or line number (text) of the problem.
//
//   FTR1  "FTR1" u32 n_frames u32 dim, f32 data row-major
//   UBM1  "UBM1" u32 K u32 d, f64 weights, means, variances row-major
//   BWS1  "BWS1" u32 K u32 d u64 frames, f64 N, f64 E row-major
//   TVM1  "TVM1" u32 K u32 d u32 R, f64 m_bar, phi row-major, sigma
//   PLD1  "PLD1" u32 R u32 r, f64 mu, V row-major, residual_cov row-major
//   IVC1  "IVC1" u32 count u32 R, then per record u16 id length, UTF-8 id,
//         R f64 values
//   FUS1  text, one "key value..." pair per line

#ifndef ASVQ_IO_H_
#define ASVQ_IO_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "asvq/bw_stats.h"
#include "asvq/features.h"
#include "asvq/fusion.h"
#include "asvq/gmm.h"
#include "asvq/ivector.h"
#include "asvq/plda.h"

namespace asvq {

// PCM 16-bit mono WAV at 8 kHz only.
AudioBuffer ReadWav(std::istream &is);
AudioBuffer ReadWav(const std::filesystem::path &path);
void WriteWav(std::ostream &os, const AudioBuffer &audio);
void WriteWav(const std::filesystem::path &path, const AudioBuffer &audio);

void WriteFeatures(std::ostream &os, const FeatureMatrix &features);
FeatureMatrix ReadFeatures(std::istream &is);
void WriteFeatures(const std::filesystem::path &path,
                   const FeatureMatrix &features);
FeatureMatrix ReadFeatures(const std::filesystem::path &path);

void WriteGmm(std::ostream &os, const Gmm &gmm);
Gmm ReadGmm(std::istream &is);
void WriteGmm(const std::filesystem::path &path, const Gmm &gmm);
Gmm ReadGmm(const std::filesystem::path &path);

void WriteBwStats(std::ostream &os, const BwStats &stats);
BwStats ReadBwStats(std::istream &is);
void WriteBwStats(const std::filesystem::path &path, const BwStats &stats);
BwStats ReadBwStats(const std::filesystem::path &path);

void WriteTvModel(std::ostream &os, const TvModel &tv);
TvModel ReadTvModel(std::istream &is);
void WriteTvModel(const std::filesystem::path &path, const TvModel &tv);
TvModel ReadTvModel(const std::filesystem::path &path);

void WritePldaModel(std::ostream &os, const PldaModel &plda);
PldaModel ReadPldaModel(std::istream &is);
void WritePldaModel(const std::filesystem::path &path, const PldaModel &plda);
PldaModel ReadPldaModel(const std::filesystem::path &path);

void WriteIvectors(std::ostream &os, const std::vector<IVector> &ivectors);
std::vector<IVector> ReadIvectors(std::istream &is);
void WriteIvectors(const std::filesystem::path &path,
                   const std::vector<IVector> &ivectors);
std::vector<IVector> ReadIvectors(const std::filesystem::path &path);

void WriteFusionModel(std::ostream &os, const FusionModel &model);
FusionModel ReadFusionModel(std::istream &is);
void WriteFusionModel(const std::filesystem::path &path,
                      const FusionModel &model);
FusionModel ReadFusionModel(const std::filesystem::path &path);

// ---- text formats ----

struct Trial {
  std::string enroll_id;
  std::string test_id;
  bool is_target = false;
};

struct ScoredTrial {
  std::string enroll_id;
  std::string test_id;
  double score = 0;
};

struct ManifestEntry {
  std::string utt_id;
  std::string speaker_id;
  long long n_frames = 0;
};

/// "<enroll-id> <test-id> <target|nontarget>" per line.
std::vector<Trial> ReadTrials(std::istream &is);
std::vector<Trial> ReadTrials(const std::filesystem::path &path);
void WriteTrials(std::ostream &os, const std::vector<Trial> &trials);

/// "<enroll-id> <test-id> <score>" per line, scores in shortest round-trip
/// decimal form.
std::vector<ScoredTrial> ReadScores(std::istream &is);
std::vector<ScoredTrial> ReadScores(const std::filesystem::path &path);
void WriteScores(std::ostream &os, const std::vector<ScoredTrial> &scores);
void WriteScores(const std::filesystem::path &path,
                 const std::vector<ScoredTrial> &scores);

/// "<utt-id> <Q>" per line.
std::map<std::string, double> ReadQualities(std::istream &is);
std::map<std::string, double> ReadQualities(const std::filesystem::path &path);
void WriteQualities(std::ostream &os,
                    const std::vector<std::pair<std::string, double>> &q);

/// "<utt-id> <speaker-id> <n-frames>" per line.
std::vector<ManifestEntry> ReadManifest(std::istream &is);
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path &path);
void WriteManifest(std::ostream &os, const std::vector<ManifestEntry> &entries);
void WriteManifest(const std::filesystem::path &path,
                   const std::vector<ManifestEntry> &entries);

/// Shortest decimal string that parses back to exactly the same double.
std::string FormatDouble(double value);

}  // namespace asvq

#endif  // ASVQ_IO_H_
