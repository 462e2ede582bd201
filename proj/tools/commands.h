// tools/commands.h

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

#ifndef ASVQ_TOOLS_COMMANDS_H_
#define ASVQ_TOOLS_COMMANDS_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asvq/io.h"
#include "asvq/parallel.h"

namespace asvq::tools {

struct GlobalOptions {
  int threads = 0;
  bool deterministic = false;

  Parallelism parallel() const { return Parallelism{threads, deterministic}; }
};

void RegisterFeatureCommands(CLI::App &app, const GlobalOptions &global);
void RegisterModelCommands(CLI::App &app, const GlobalOptions &global);
void RegisterAnalysisCommands(CLI::App &app, const GlobalOptions &global);

// ---- shared helpers ----

std::filesystem::path UttPath(const std::filesystem::path &dir,
                              const std::string &utt, const char *ext);

/// Manifest entries with duplicate-id detection.
std::vector<ManifestEntry> LoadManifest(const std::filesystem::path &path);

/// utt-id -> speaker-id.
std::map<std::string, std::string> SpeakerMap(
    const std::vector<ManifestEntry> &manifest);

void EnsureDirectory(const std::filesystem::path &dir);

/// Decimal form that always carries a fraction or exponent ("0.0", "1e-05").
std::string FormatReal(double value);

}  // namespace asvq::tools

#endif  // ASVQ_TOOLS_COMMANDS_H_
