// tests/tools/make_test_wav.cc

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

// Writes a noisy two-tone 8 kHz test signal with leading silence, used by
// the command-line smoke test.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>

#include "asvq/io.h"

int main(int argc, char **argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: make_test_wav <out.wav> <seconds>\n");
    return 2;
  }
  const double seconds = std::atof(argv[2]);
  asvq::AudioBuffer audio;
  const std::size_t n = static_cast<std::size_t>(seconds * audio.sample_rate);
  audio.samples.resize(n);
  std::mt19937 rng(1);
  std::normal_distribution<double> noise(0.0, 300.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n / 10) continue;  // digital silence
    const double t = static_cast<double>(i) / audio.sample_rate;
    const double v = 6000 * std::sin(2 * std::numbers::pi * 300 * t) *
                         (1 + 0.5 * std::sin(2 * std::numbers::pi * 3 * t)) +
                     2000 * std::sin(2 * std::numbers::pi * 1250 * t) + noise(rng);
    audio.samples[i] = static_cast<std::int16_t>(std::lround(std::clamp(v, -32768.0, 32767.0)));
  }
  try {
    asvq::WriteWav(std::filesystem::path(argv[1]), audio);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
