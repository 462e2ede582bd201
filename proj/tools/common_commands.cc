// tools/common_commands.cc

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

#include <set>

#include "commands.h"

namespace asvq::tools {

std::filesystem::path UttPath(const std::filesystem::path &dir,
                              const std::string &utt, const char *ext) {
  return dir / (utt + ext);
}

std::vector<ManifestEntry> LoadManifest(const std::filesystem::path &path) {
  std::vector<ManifestEntry> manifest = ReadManifest(path);
  if (manifest.empty())
    throw Error(ErrorKind::kInsufficientData, path.string() + ": empty manifest");
  std::set<std::string> seen;
  for (const ManifestEntry &e : manifest)
    if (!seen.insert(e.utt_id).second)
      throw Error(ErrorKind::kFormat, path.string() + ": duplicate utterance id '" + e.utt_id + "'");
  return manifest;
}

std::map<std::string, std::string> SpeakerMap(const std::vector<ManifestEntry> &manifest) {
  std::map<std::string, std::string> out;
  for (const ManifestEntry &e : manifest) out.emplace(e.utt_id, e.speaker_id);
  return out;
}

void EnsureDirectory(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());
}

std::string FormatReal(double value) {
  std::string s = FormatDouble(value);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace asvq::tools
