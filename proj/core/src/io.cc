// core/src/io.cc

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

#include "asvq/io.h"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace asvq {

namespace {

constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 31;

class BinaryReader {
 public:
  BinaryReader(std::istream &is, const char *format) : is_(is), format_(format) {}

  [[noreturn]] void Fail(const std::string &msg) const {
    std::ostringstream out;
    out << format_ << ": " << msg << " at offset " << offset_;
    throw Error(ErrorKind::kFormat, out.str());
  }

  void Magic(const char *magic) {
    std::array<char, 4> got{};
    Raw(got.data(), 4, "magic");
    if (std::memcmp(got.data(), magic, 4) != 0) {
      offset_ = 0;
      Fail(std::string("bad magic, expected '") + magic + "'");
    }
  }

  std::uint64_t Uint(int bytes, const char *what) {
    unsigned char buf[8];
    Raw(reinterpret_cast<char *>(buf), bytes, what);
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  std::uint32_t U32(const char *what) { return static_cast<std::uint32_t>(Uint(4, what)); }
  std::uint16_t U16(const char *what) { return static_cast<std::uint16_t>(Uint(2, what)); }
  std::uint64_t U64(const char *what) { return Uint(8, what); }
  double F64(const char *what) { return std::bit_cast<double>(U64(what)); }
  float F32(const char *what) { return std::bit_cast<float>(U32(what)); }

  std::string Bytes(std::size_t n, const char *what) {
    std::string s(n, '\0');
    if (n > 0) Raw(s.data(), n, what);
    return s;
  }

  void CheckCount(std::uint64_t count, const char *what) const {
    if (count > kMaxElements) Fail(std::string("implausible ") + what + " size");
  }

  Vector ReadVector(std::uint64_t n, const char *what) {
    CheckCount(n, what);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = F64(what);
    return v;
  }

  RowMatrix ReadMatrix(std::uint64_t rows, std::uint64_t cols, const char *what) {
    CheckCount(rows * cols, what);
    RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = F64(what);
    return m;
  }

  void ExpectEnd() {
    if (is_.peek() != std::char_traits<char>::eof()) Fail("trailing bytes");
  }

  std::uint64_t offset() const { return offset_; }

 private:
  void Raw(char *dst, std::size_t n, const char *what) {
    is_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n)
      Fail(std::string("truncated while reading ") + what);
    offset_ += n;
  }

  std::istream &is_;
  const char *format_;
  std::uint64_t offset_ = 0;
};

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream &os) : os_(os) {}
  void Raw(const char *src, std::size_t n) { os_.write(src, static_cast<std::streamsize>(n)); }
  void Uint(std::uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    Raw(buf, bytes);
  }
  void U16(std::uint16_t v) { Uint(v, 2); }
  void U32(std::uint32_t v) { Uint(v, 4); }
  void U64(std::uint64_t v) { Uint(v, 8); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  template <class Derived>
  void Doubles(const Eigen::DenseBase<Derived> &m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) F64(m(r, c));
  }
  void Check(const char *format) {
    if (!os_) throw Error(ErrorKind::kIo, std::string("failed writing ") + format);
  }

 private:
  std::ostream &os_;
};

std::uint32_t CheckedU32(Eigen::Index v, const char *what) {
  if (v < 0 || static_cast<std::uint64_t>(v) > 0xffffffffULL)
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

std::ifstream OpenIn(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  return is;
}

std::ofstream OpenOut(const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  return os;
}

// Wraps a stream reader so errors carry the file name.
template <class Fn>
auto ReadFile(const std::filesystem::path &path, Fn &&fn) {
  std::ifstream is = OpenIn(path);
  try {
    return fn(is);
  } catch (const Error &e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

template <class Fn>
void WriteFile(const std::filesystem::path &path, Fn &&fn) {
  std::ofstream os = OpenOut(path);
  fn(os);
  os.close();
  if (!os) throw Error(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

}  // namespace

// ---------------------------------------------------------------- WAV

AudioBuffer ReadWav(std::istream &is) {
  BinaryReader in(is, "WAV");
  in.Magic("RIFF");
  in.U32("riff size");
  if (in.Bytes(4, "wave tag") != "WAVE") in.Fail("not a WAVE file");
  bool have_fmt = false;
  AudioBuffer audio;
  while (true) {
    const std::string id = in.Bytes(4, "chunk id");
    const std::uint32_t size = in.U32("chunk size");
    if (id == "fmt ") {
      if (size < 16) in.Fail("fmt chunk too small");
      const std::uint16_t format = in.U16("audio format");
      const std::uint16_t channels = in.U16("channel count");
      const std::uint32_t rate = in.U32("sample rate");
      in.U32("byte rate");
      in.U16("block align");
      const std::uint16_t bits = in.U16("bits per sample");
      in.Bytes(size - 16 + (size & 1), "fmt extension");
      if (format != 1) in.Fail("only PCM audio is supported");
      if (channels != 1) in.Fail("only mono audio is supported, got " + std::to_string(channels) + " channels");
      if (bits != 16) in.Fail("only 16-bit samples are supported, got " + std::to_string(bits));
      if (rate != 8000) in.Fail("only 8000 Hz audio is supported, got " + std::to_string(rate) + " Hz");
      audio.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) in.Fail("data chunk before fmt chunk");
      if (size % 2 != 0) in.Fail("odd data chunk size for 16-bit samples");
      audio.samples.resize(size / 2);
      for (auto &s : audio.samples) s = static_cast<std::int16_t>(in.U16("sample"));
      return audio;
    } else {
      in.Bytes(size + (size & 1), "skipped chunk");
    }
  }
}

AudioBuffer ReadWav(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadWav(is); });
}

void WriteWav(std::ostream &os, const AudioBuffer &audio) {
  const std::uint32_t data_bytes = CheckedU32(
      static_cast<Eigen::Index>(audio.samples.size() * 2), "wav data size");
  BinaryWriter out(os);
  out.Raw("RIFF", 4);
  out.U32(36 + data_bytes);
  out.Raw("WAVE", 4);
  out.Raw("fmt ", 4);
  out.U32(16);
  out.U16(1);
  out.U16(1);
  out.U32(static_cast<std::uint32_t>(audio.sample_rate));
  out.U32(static_cast<std::uint32_t>(audio.sample_rate) * 2);
  out.U16(2);
  out.U16(16);
  out.Raw("data", 4);
  out.U32(data_bytes);
  for (std::int16_t s : audio.samples) out.U16(static_cast<std::uint16_t>(s));
  out.Check("WAV");
}

void WriteWav(const std::filesystem::path &path, const AudioBuffer &audio) {
  WriteFile(path, [&](std::ostream &os) { WriteWav(os, audio); });
}

// ---------------------------------------------------------------- FTR1

void WriteFeatures(std::ostream &os, const FeatureMatrix &features) {
  BinaryWriter out(os);
  out.Raw("FTR1", 4);
  out.U32(CheckedU32(features.rows(), "frame count"));
  out.U32(CheckedU32(features.cols(), "feature dim"));
  for (Eigen::Index r = 0; r < features.rows(); ++r)
    for (Eigen::Index c = 0; c < features.cols(); ++c)
      out.F32(static_cast<float>(features(r, c)));
  out.Check("FTR1");
}

FeatureMatrix ReadFeatures(std::istream &is) {
  BinaryReader in(is, "FTR1");
  in.Magic("FTR1");
  const std::uint64_t rows = in.U32("frame count");
  const std::uint64_t cols = in.U32("feature dim");
  in.CheckCount(rows * cols, "feature matrix");
  FeatureMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const float v = in.F32("feature value");
      if (!std::isfinite(v)) in.Fail("non-finite feature value");
      m(r, c) = v;
    }
  }
  in.ExpectEnd();
  return m;
}

void WriteFeatures(const std::filesystem::path &path, const FeatureMatrix &features) {
  WriteFile(path, [&](std::ostream &os) { WriteFeatures(os, features); });
}

FeatureMatrix ReadFeatures(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadFeatures(is); });
}

// ---------------------------------------------------------------- UBM1

void WriteGmm(std::ostream &os, const Gmm &gmm) {
  gmm.Validate();
  BinaryWriter out(os);
  out.Raw("UBM1", 4);
  out.U32(CheckedU32(gmm.NumComponents(), "component count"));
  out.U32(CheckedU32(gmm.Dim(), "dim"));
  out.Doubles(gmm.weights.transpose());
  out.Doubles(gmm.means);
  out.Doubles(gmm.variances);
  out.Check("UBM1");
}

Gmm ReadGmm(std::istream &is) {
  BinaryReader in(is, "UBM1");
  in.Magic("UBM1");
  const std::uint64_t k = in.U32("component count");
  const std::uint64_t d = in.U32("dim");
  if (k == 0 || d == 0) in.Fail("empty model");
  Gmm gmm;
  gmm.weights = in.ReadVector(k, "weights");
  gmm.means = in.ReadMatrix(k, d, "means");
  gmm.variances = in.ReadMatrix(k, d, "variances");
  in.ExpectEnd();
  try {
    gmm.Validate();
  } catch (const Error &e) {
    throw Error(ErrorKind::kFormat, std::string("UBM1: invalid model: ") + e.what());
  }
  return gmm;
}

void WriteGmm(const std::filesystem::path &path, const Gmm &gmm) {
  WriteFile(path, [&](std::ostream &os) { WriteGmm(os, gmm); });
}

Gmm ReadGmm(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadGmm(is); });
}

// ---------------------------------------------------------------- BWS1

void WriteBwStats(std::ostream &os, const BwStats &stats) {
  if (stats.e.rows() != stats.n.size())
    throw Error(ErrorKind::kDimensionMismatch, "stats shapes disagree");
  BinaryWriter out(os);
  out.Raw("BWS1", 4);
  out.U32(CheckedU32(stats.NumComponents(), "component count"));
  out.U32(CheckedU32(stats.Dim(), "dim"));
  out.U64(static_cast<std::uint64_t>(stats.frames));
  out.Doubles(stats.n.transpose());
  out.Doubles(stats.e);
  out.Check("BWS1");
}

BwStats ReadBwStats(std::istream &is) {
  BinaryReader in(is, "BWS1");
  in.Magic("BWS1");
  const std::uint64_t k = in.U32("component count");
  const std::uint64_t d = in.U32("dim");
  BwStats stats;
  const std::uint64_t frames = in.U64("frame count");
  if (frames > static_cast<std::uint64_t>(INT64_MAX)) in.Fail("frame count overflow");
  stats.frames = static_cast<std::int64_t>(frames);
  stats.n = in.ReadVector(k, "zeroth order stats");
  stats.e = in.ReadMatrix(k, d, "first order stats");
  in.ExpectEnd();
  if ((stats.n.array() < 0).any() || !stats.n.allFinite() || !stats.e.allFinite())
    throw Error(ErrorKind::kFormat, "BWS1: invalid statistics values");
  return stats;
}

void WriteBwStats(const std::filesystem::path &path, const BwStats &stats) {
  WriteFile(path, [&](std::ostream &os) { WriteBwStats(os, stats); });
}

BwStats ReadBwStats(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadBwStats(is); });
}

// ---------------------------------------------------------------- TVM1

void WriteTvModel(std::ostream &os, const TvModel &tv) {
  tv.Validate();
  BinaryWriter out(os);
  out.Raw("TVM1", 4);
  out.U32(CheckedU32(tv.num_components, "component count"));
  out.U32(CheckedU32(tv.dim, "dim"));
  out.U32(CheckedU32(tv.Rank(), "rank"));
  out.Doubles(tv.m_bar.transpose());
  out.Doubles(tv.phi);
  out.Doubles(tv.sigma.transpose());
  out.Check("TVM1");
}

TvModel ReadTvModel(std::istream &is) {
  BinaryReader in(is, "TVM1");
  in.Magic("TVM1");
  TvModel tv;
  tv.num_components = static_cast<int>(in.U32("component count"));
  tv.dim = static_cast<int>(in.U32("dim"));
  const std::uint64_t rank = in.U32("rank");
  const std::uint64_t sv = static_cast<std::uint64_t>(tv.num_components) * tv.dim;
  tv.m_bar = in.ReadVector(sv, "supervector mean");
  tv.phi = in.ReadMatrix(sv, rank, "loading matrix");
  tv.sigma = in.ReadVector(sv, "covariance");
  in.ExpectEnd();
  try {
    tv.Validate();
  } catch (const Error &e) {
    throw Error(ErrorKind::kFormat, std::string("TVM1: invalid model: ") + e.what());
  }
  return tv;
}

void WriteTvModel(const std::filesystem::path &path, const TvModel &tv) {
  WriteFile(path, [&](std::ostream &os) { WriteTvModel(os, tv); });
}

TvModel ReadTvModel(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadTvModel(is); });
}

// ---------------------------------------------------------------- PLD1

void WritePldaModel(std::ostream &os, const PldaModel &plda) {
  plda.Validate();
  BinaryWriter out(os);
  out.Raw("PLD1", 4);
  out.U32(CheckedU32(plda.Dim(), "dim"));
  out.U32(CheckedU32(plda.SpeakerRank(), "speaker rank"));
  out.Doubles(plda.mu.transpose());
  out.Doubles(plda.v);
  out.Doubles(plda.residual_cov);
  out.Check("PLD1");
}

PldaModel ReadPldaModel(std::istream &is) {
  BinaryReader in(is, "PLD1");
  in.Magic("PLD1");
  const std::uint64_t dim = in.U32("dim");
  const std::uint64_t rank = in.U32("speaker rank");
  PldaModel plda;
  plda.mu = in.ReadVector(dim, "mean");
  plda.v = in.ReadMatrix(dim, rank, "speaker subspace");
  plda.residual_cov = in.ReadMatrix(dim, dim, "residual covariance");
  in.ExpectEnd();
  try {
    plda.Validate();
  } catch (const Error &e) {
    throw Error(ErrorKind::kFormat, std::string("PLD1: invalid model: ") + e.what());
  }
  return plda;
}

void WritePldaModel(const std::filesystem::path &path, const PldaModel &plda) {
  WriteFile(path, [&](std::ostream &os) { WritePldaModel(os, plda); });
}

PldaModel ReadPldaModel(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadPldaModel(is); });
}

// ---------------------------------------------------------------- IVC1

void WriteIvectors(std::ostream &os, const std::vector<IVector> &ivectors) {
  const Eigen::Index dim = ivectors.empty() ? 0 : ivectors.front().y.size();
  BinaryWriter out(os);
  out.Raw("IVC1", 4);
  out.U32(CheckedU32(static_cast<Eigen::Index>(ivectors.size()), "record count"));
  out.U32(CheckedU32(dim, "i-vector dim"));
  for (const IVector &iv : ivectors) {
    if (iv.y.size() != dim)
      throw Error(ErrorKind::kDimensionMismatch, "i-vectors differ in dimension");
    if (iv.source_utt.size() > 0xffff)
      throw Error(ErrorKind::kInvalidArgument, "utterance id longer than 65535 bytes");
    out.U16(static_cast<std::uint16_t>(iv.source_utt.size()));
    out.Raw(iv.source_utt.data(), iv.source_utt.size());
    out.Doubles(iv.y.transpose());
  }
  out.Check("IVC1");
}

std::vector<IVector> ReadIvectors(std::istream &is) {
  BinaryReader in(is, "IVC1");
  in.Magic("IVC1");
  const std::uint64_t count = in.U32("record count");
  const std::uint64_t dim = in.U32("i-vector dim");
  in.CheckCount(count * std::max<std::uint64_t>(dim, 1), "i-vector set");
  std::vector<IVector> out;
  for (std::uint64_t k = 0; k < count; ++k) {
    IVector iv;
    iv.source_utt = in.Bytes(in.U16("id length"), "utterance id");
    iv.y = in.ReadVector(dim, "i-vector values");
    if (!iv.y.allFinite()) in.Fail("non-finite i-vector value");
    out.push_back(std::move(iv));
  }
  in.ExpectEnd();
  return out;
}

void WriteIvectors(const std::filesystem::path &path, const std::vector<IVector> &ivectors) {
  WriteFile(path, [&](std::ostream &os) { WriteIvectors(os, ivectors); });
}

std::vector<IVector> ReadIvectors(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadIvectors(is); });
}

// ---------------------------------------------------------------- text

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

// Whitespace-separated fields of each non-blank line, with line numbers for
// diagnostics.
class TextReader {
 public:
  TextReader(std::istream &is, const char *format) : is_(is), format_(format) {}

  bool Next(std::vector<std::string> *fields) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      fields->clear();
      for (std::string f; ss >> f;) fields->push_back(f);
      if (!fields->empty()) return true;
    }
    return false;
  }

  [[noreturn]] void Fail(const std::string &msg) const {
    std::ostringstream out;
    out << format_ << ": " << msg << " at line " << line_no_;
    throw Error(ErrorKind::kFormat, out.str());
  }

  double Number(const std::string &s) const {
    double v = 0;
    const char *end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
      Fail("invalid number '" + s + "'");
    return v;
  }

 private:
  std::istream &is_;
  const char *format_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::vector<Trial> ReadTrials(std::istream &is) {
  TextReader in(is, "trial list");
  std::vector<Trial> out;
  for (std::vector<std::string> f; in.Next(&f);) {
    if (f.size() != 3) in.Fail("expected 3 fields");
    if (f[2] != "target" && f[2] != "nontarget")
      in.Fail("label must be 'target' or 'nontarget'");
    out.push_back({f[0], f[1], f[2] == "target"});
  }
  return out;
}

std::vector<Trial> ReadTrials(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadTrials(is); });
}

void WriteTrials(std::ostream &os, const std::vector<Trial> &trials) {
  for (const Trial &t : trials)
    os << t.enroll_id << ' ' << t.test_id << ' '
       << (t.is_target ? "target" : "nontarget") << '\n';
}

std::vector<ScoredTrial> ReadScores(std::istream &is) {
  TextReader in(is, "score file");
  std::vector<ScoredTrial> out;
  for (std::vector<std::string> f; in.Next(&f);) {
    if (f.size() != 3) in.Fail("expected 3 fields");
    out.push_back({f[0], f[1], in.Number(f[2])});
  }
  return out;
}

std::vector<ScoredTrial> ReadScores(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadScores(is); });
}

void WriteScores(std::ostream &os, const std::vector<ScoredTrial> &scores) {
  for (const ScoredTrial &s : scores)
    os << s.enroll_id << ' ' << s.test_id << ' ' << FormatDouble(s.score) << '\n';
}

void WriteScores(const std::filesystem::path &path, const std::vector<ScoredTrial> &scores) {
  WriteFile(path, [&](std::ostream &os) { WriteScores(os, scores); });
}

std::map<std::string, double> ReadQualities(std::istream &is) {
  TextReader in(is, "quality file");
  std::map<std::string, double> out;
  for (std::vector<std::string> f; in.Next(&f);) {
    if (f.size() != 2) in.Fail("expected 2 fields");
    if (!out.emplace(f[0], in.Number(f[1])).second) in.Fail("duplicate id '" + f[0] + "'");
  }
  return out;
}

std::map<std::string, double> ReadQualities(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadQualities(is); });
}

void WriteQualities(std::ostream &os,
                    const std::vector<std::pair<std::string, double>> &q) {
  for (const auto &[id, value] : q) os << id << ' ' << FormatDouble(value) << '\n';
}

std::vector<ManifestEntry> ReadManifest(std::istream &is) {
  TextReader in(is, "manifest");
  std::vector<ManifestEntry> out;
  for (std::vector<std::string> f; in.Next(&f);) {
    if (f.size() != 3) in.Fail("expected 3 fields");
    long long n = 0;
    const auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), n);
    if (res.ec != std::errc() || res.ptr != f[2].data() + f[2].size() || n < 0)
      in.Fail("invalid frame count '" + f[2] + "'");
    out.push_back({f[0], f[1], n});
  }
  return out;
}

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadManifest(is); });
}

void WriteManifest(std::ostream &os, const std::vector<ManifestEntry> &entries) {
  for (const ManifestEntry &e : entries)
    os << e.utt_id << ' ' << e.speaker_id << ' ' << e.n_frames << '\n';
}

void WriteManifest(const std::filesystem::path &path,
                   const std::vector<ManifestEntry> &entries) {
  WriteFile(path, [&](std::ostream &os) { WriteManifest(os, entries); });
}

// ---------------------------------------------------------------- FUS1

void WriteFusionModel(std::ostream &os, const FusionModel &model) {
  os << "FUS1\n"
     << "version 1\n"
     << "kind " << FusionKindName(model.kind) << '\n'
     << "alpha " << FormatDouble(model.alpha[0]) << ' ' << FormatDouble(model.alpha[1]) << '\n'
     << "theta " << FormatDouble(model.theta) << '\n'
     << "beta " << FormatDouble(model.beta) << '\n'
     << "prior " << FormatDouble(model.prior) << '\n';
  if (!os) throw Error(ErrorKind::kIo, "failed writing FUS1");
}

FusionModel ReadFusionModel(std::istream &is) {
  TextReader in(is, "FUS1");
  std::vector<std::string> f;
  if (!in.Next(&f) || f.size() != 1 || f[0] != "FUS1") in.Fail("missing FUS1 header");
  FusionModel model;
  std::map<std::string, bool> seen;
  while (in.Next(&f)) {
    const std::string &key = f[0];
    if (seen[key]) in.Fail("duplicate key '" + key + "'");
    seen[key] = true;
    auto expect = [&](std::size_t n) {
      if (f.size() != n + 1) in.Fail("key '" + key + "' expects " + std::to_string(n) + " value(s)");
    };
    if (key == "version") {
      expect(1);
      if (f[1] != "1") in.Fail("unsupported version " + f[1]);
    } else if (key == "kind") {
      expect(1);
      try {
        model.kind = ParseFusionKind(f[1]);
      } catch (const Error &) {
        in.Fail("unknown kind '" + f[1] + "'");
      }
    } else if (key == "alpha") {
      expect(2);
      model.alpha = {in.Number(f[1]), in.Number(f[2])};
    } else if (key == "theta") {
      expect(1);
      model.theta = in.Number(f[1]);
    } else if (key == "beta") {
      expect(1);
      model.beta = in.Number(f[1]);
    } else if (key == "prior") {
      expect(1);
      model.prior = in.Number(f[1]);
    } else {
      in.Fail("unknown key '" + key + "'");
    }
  }
  for (const char *required : {"version", "kind", "alpha", "theta", "beta", "prior"})
    if (!seen[required]) in.Fail(std::string("missing key '") + required + "'");
  return model;
}

void WriteFusionModel(const std::filesystem::path &path, const FusionModel &model) {
  WriteFile(path, [&](std::ostream &os) { WriteFusionModel(os, model); });
}

FusionModel ReadFusionModel(const std::filesystem::path &path) {
  return ReadFile(path, [](std::istream &is) { return ReadFusionModel(is); });
}

}  // namespace asvq
