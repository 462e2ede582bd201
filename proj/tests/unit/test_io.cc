// tests/unit/test_io.cc

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

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asvq/io.h"
#include "asvq/synth.h"
#include "doctest.h"

namespace asvq {
namespace {

std::string ErrorText(const std::function<void()> &fn, ErrorKind *kind = nullptr) {
  try {
    fn();
  } catch (const Error &e) {
    if (kind) *kind = e.kind();
    return e.what();
  }
  return {};
}

template <class T, class W, class R>
T RoundTrip(const T &value, W write, R read) {
  std::stringstream ss;
  write(ss, value);
  return read(ss);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("wav round trip and validation") {
  AudioBuffer audio;
  audio.samples = {0, 1, -1, 32767, -32768, 1234};
  std::stringstream ss;
  WriteWav(ss, audio);
  const AudioBuffer back = ReadWav(ss);
  CHECK(back.samples == audio.samples);
  CHECK(back.sample_rate == 8000);

  audio.sample_rate = 16000;
  std::stringstream wrong;
  WriteWav(wrong, audio);
  ErrorKind kind{};
  const std::string msg = ErrorText([&] { ReadWav(wrong); }, &kind);
  CHECK(kind == ErrorKind::kFormat);
  CHECK(msg.find("8000") != std::string::npos);

  std::stringstream junk("RIFX....");
  CHECK(ErrorText([&] { ReadWav(junk); }).find("offset 0") != std::string::npos);
}

TEST_CASE("feature round trip is exact at float precision") {
  FeatureMatrix x(3, 2);
  x << 0.5, -1.25, 3.0, 1e-3, -7.5, 2.0;
  const FeatureMatrix back = RoundTrip(x, [](std::ostream &os, const FeatureMatrix &m) { WriteFeatures(os, m); },
                                       [](std::istream &is) { return ReadFeatures(is); });
  CHECK(back.rows() == 3);
  CHECK((back - x.cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncated feature file reports the byte offset") {
  std::stringstream ss;
  WriteFeatures(ss, FeatureMatrix::Ones(2, 2));
  const std::string full = ss.str();
  std::stringstream cut(full.substr(0, full.size() - 4));
  ErrorKind kind{};
  const std::string msg = ErrorText([&] { ReadFeatures(cut); }, &kind);
  CHECK(kind == ErrorKind::kFormat);
  CHECK(msg.find("FTR1") != std::string::npos);
  CHECK(msg.find("at offset 24") != std::string::npos);

  std::stringstream extra(full + "x");
  CHECK(ErrorText([&] { ReadFeatures(extra); }).find("trailing") != std::string::npos);
  std::stringstream magic("FTR2" + full.substr(4));
  CHECK(ErrorText([&] { ReadFeatures(magic); }).find("bad magic") != std::string::npos);
}

TEST_CASE("gmm round trip and corrupt weights") {
  std::mt19937_64 rng(1);
  const Gmm g = RandomGmm(4, 3, rng);
  std::stringstream ss;
  WriteGmm(ss, g);
  const std::string bytes = ss.str();
  CHECK(bytes.size() == 12 + 8 * (4 + 12 + 12));
  std::stringstream in(bytes);
  const Gmm back = ReadGmm(in);
  CHECK(back.weights == g.weights);
  CHECK(back.means == g.means);
  CHECK(back.variances == g.variances);

  std::string bad = bytes;
  bad[12 + 7] = 0x7f;  // first weight becomes huge
  std::stringstream corrupt(bad);
  ErrorKind kind{};
  ErrorText([&] { ReadGmm(corrupt); }, &kind);
  CHECK(kind == ErrorKind::kFormat);
}

TEST_CASE("statistics round trip") {
  std::mt19937_64 rng(2);
  const Gmm g = RandomGmm(3, 2, rng);
  const BwStats s = AccumulateBw(g, SampleFrames(g, 25, rng));
  const BwStats back = RoundTrip(s, [](std::ostream &os, const BwStats &v) { WriteBwStats(os, v); },
                                 [](std::istream &is) { return ReadBwStats(is); });
  CHECK(back.n == s.n);
  CHECK(back.e == s.e);
  CHECK(back.frames == 25);
}

TEST_CASE("tv and plda model round trips") {
  std::mt19937_64 rng(3);
  const Gmm g = RandomGmm(3, 2, rng);
  const TvModel tv = InitTvModel(g, 2, 7, 0.5);
  const TvModel tv_back = RoundTrip(tv, [](std::ostream &os, const TvModel &v) { WriteTvModel(os, v); },
                                    [](std::istream &is) { return ReadTvModel(is); });
  CHECK(tv_back.phi == tv.phi);
  CHECK(tv_back.m_bar == tv.m_bar);
  CHECK(tv_back.sigma == tv.sigma);
  CHECK(tv_back.num_components == 3);
  CHECK(tv_back.dim == 2);

  PldaModel p;
  p.mu = Vector::LinSpaced(3, -1, 1);
  p.v = RowMatrix::Ones(3, 2);
  p.residual_cov = RowMatrix::Identity(3, 3) * 2.0;
  const PldaModel p_back = RoundTrip(p, [](std::ostream &os, const PldaModel &v) { WritePldaModel(os, v); },
                                     [](std::istream &is) { return ReadPldaModel(is); });
  CHECK(p_back.mu == p.mu);
  CHECK(p_back.v == p.v);
  CHECK(p_back.residual_cov == p.residual_cov);
}

TEST_CASE("i-vector archive round trip") {
  std::vector<IVector> ivs(2);
  ivs[0].y = Vector::Constant(3, 0.25);
  ivs[0].source_utt = "utt_a";
  ivs[1].y = Vector::LinSpaced(3, 1, 3);
  ivs[1].source_utt = "b";
  const auto back = RoundTrip(ivs, [](std::ostream &os, const std::vector<IVector> &v) { WriteIvectors(os, v); },
                              [](std::istream &is) { return ReadIvectors(is); });
  REQUIRE(back.size() == 2);
  CHECK(back[0].source_utt == "utt_a");
  CHECK(back[1].y == ivs[1].y);
}

TEST_CASE("fusion model text round trip and errors") {
  FusionModel m;
  m.alpha = {0.1, -2.5e-7};
  m.theta = 1.0 / 3.0;
  m.beta = -0.75;
  m.kind = FusionKind::kQuality;
  m.prior = 0.25;
  std::stringstream ss;
  WriteFusionModel(ss, m);
  const FusionModel back = ReadFusionModel(ss);
  CHECK(back.alpha == m.alpha);
  CHECK(back.theta == m.theta);
  CHECK(back.beta == m.beta);
  CHECK(back.kind == m.kind);
  CHECK(back.prior == m.prior);

  std::stringstream unknown("FUS1\nversion 1\nkind linear\nalpha 1 0\ntheta 0\nbeta 0\nprior 0.5\ngamma 2\n");
  CHECK(ErrorText([&] { ReadFusionModel(unknown); }).find("line 8") != std::string::npos);
  std::stringstream missing("FUS1\nversion 1\nkind linear\n");
  ErrorKind kind{};
  ErrorText([&] { ReadFusionModel(missing); }, &kind);
  CHECK(kind == ErrorKind::kFormat);
}

TEST_CASE("text formats") {
  std::stringstream trials("a b target\n\nc d nontarget\n");
  const auto t = ReadTrials(trials);
  REQUIRE(t.size() == 2);
  CHECK(t[0].is_target);
  CHECK_FALSE(t[1].is_target);
  std::stringstream bad_label("a b maybe\n");
  CHECK(ErrorText([&] { ReadTrials(bad_label); }).find("line 1") != std::string::npos);

  std::stringstream scores("a b 1.5e-3\nc d -2\n");
  const auto s = ReadScores(scores);
  CHECK(s[0].score == 1.5e-3);
  CHECK(s[1].score == -2.0);
  std::stringstream bad_score("a b 1\nc d x\n");
  CHECK(ErrorText([&] { ReadScores(bad_score); }).find("line 2") != std::string::npos);

  std::stringstream q("u1 0.5\nu1 0.6\n");
  CHECK(ErrorText([&] { ReadQualities(q); }).find("duplicate") != std::string::npos);

  std::stringstream manifest;
  WriteManifest(manifest, {{"u1", "s1", 10}, {"u2", "s1", 20}});
  const auto m = ReadManifest(manifest);
  REQUIRE(m.size() == 2);
  CHECK(m[1].n_frames == 20);
}

TEST_CASE("score values round trip through the shortest decimal form") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double v = normal(rng);
    CHECK(std::stod(FormatDouble(v)) == v);
  }
  CHECK(FormatDouble(0.5) == "0.5");
}

TEST_CASE("missing files raise io errors with the path") {
  ErrorKind kind{};
  const std::string msg =
      ErrorText([] { ReadFeatures(std::filesystem::path("/nonexistent/x.ftr")); }, &kind);
  CHECK(kind == ErrorKind::kIo);
  CHECK(msg.find("/nonexistent/x.ftr") != std::string::npos);
}

}  // TEST_SUITE

}  // namespace asvq
