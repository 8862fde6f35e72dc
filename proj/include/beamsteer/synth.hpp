// Copyright 2026 The beamsteer authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace beamsteer {

/// Deterministic random source. Gaussian draws use an explicit Box-Muller
/// transform instead of std::normal_distribution, whose output sequence is
/// implementation-defined; this keeps seeded runs byte-identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double gaussian();
  /// Derives an independent stream for a named substream.
  Rng fork(uint64_t stream_id);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Eigen::ArrayXd white_noise(Eigen::Index n, Rng &rng);

/// Approximate 1/f spectrum (cascaded first-order filter bank on white noise),
/// unit RMS.
Eigen::ArrayXd pink_noise(Eigen::Index n, Rng &rng);

/// Voiced-sounding test source: harmonic tone with pitch drift, formant-like
/// spectral shaping, syllabic amplitude modulation with silent pauses, and a
/// weak wideband component. Unit peak.
Eigen::ArrayXd speech_like(Eigen::Index n, double sample_rate_hz, Rng &rng);

/// Several independent speech_like streams mixed; a stationary-ish crowd bed.
Eigen::ArrayXd babble(Eigen::Index n, double sample_rate_hz, Rng &rng);

/// Resolves an audio reference to `n` mono samples at `sample_rate_hz`.
/// References: "synth:white", "synth:pink", "synth:speech", "synth:babble",
/// or a WAV path (mono or first channel; looped or truncated to length,
/// resampling not supported: sample rate must match).
Eigen::ArrayXd resolve_source_audio(const std::string &ref, Eigen::Index n,
                                    double sample_rate_hz, Rng &rng);

}  // namespace beamsteer
