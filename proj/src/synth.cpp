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

#include "beamsteer/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "beamsteer/geometry.hpp"
#include "beamsteer/wav_io.hpp"

namespace beamsteer {

double Rng::uniform() {
  // 53-bit mantissa, never returns 1.0.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Rng Rng::fork(uint64_t stream_id) {
  const uint64_t base = engine_();
  // splitmix64 step decorrelates the child seed from the parent stream.
  uint64_t z = base + stream_id * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return Rng(z ^ (z >> 31));
}

Eigen::ArrayXd white_noise(Eigen::Index n, Rng &rng) {
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.gaussian();
  return out;
}

Eigen::ArrayXd pink_noise(Eigen::Index n, Rng &rng) {
  // Three-pole approximation; flat within about 0.5 dB over the speech band.
  Eigen::ArrayXd out(n);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double white = rng.gaussian();
    b0 = 0.99765 * b0 + white * 0.0990460;
    b1 = 0.96300 * b1 + white * 0.2965164;
    b2 = 0.57000 * b2 + white * 1.0526913;
    out[i] = b0 + b1 + b2 + white * 0.1848;
  }
  const double scale = std::sqrt(out.square().mean());
  if (scale > 0.0) out /= scale;
  return out;
}

Eigen::ArrayXd speech_like(Eigen::Index n, double sample_rate_hz, Rng &rng) {
  if (sample_rate_hz <= 0.0) {
    throw std::invalid_argument("speech_like: sample_rate_hz must be positive");
  }
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  if (n == 0) return out;

  const double fs = sample_rate_hz;
  const double f0_base = 100.0 + 60.0 * rng.uniform();
  const double drift_hz = 0.25 + 0.25 * rng.uniform();
  const double drift_phase = 2.0 * kPi * rng.uniform();

  // Syllabic gating: voiced bursts of 150-350 ms separated by 60-250 ms gaps.
  Eigen::ArrayXd gate = Eigen::ArrayXd::Zero(n);
  Eigen::Index pos = 0;
  while (pos < n) {
    const Eigen::Index burst = static_cast<Eigen::Index>((0.15 + 0.2 * rng.uniform()) * fs);
    const Eigen::Index gap = static_cast<Eigen::Index>((0.06 + 0.19 * rng.uniform()) * fs);
    const Eigen::Index edge = static_cast<Eigen::Index>(0.02 * fs);
    const Eigen::Index end = std::min(n, pos + burst);
    for (Eigen::Index i = pos; i < end; ++i) {
      double g = 1.0;
      if (i - pos < edge) g = 0.5 - 0.5 * std::cos(kPi * (i - pos) / static_cast<double>(edge));
      if (end - 1 - i < edge) {
        g = std::min(g, 0.5 - 0.5 * std::cos(kPi * (end - 1 - i) / static_cast<double>(edge)));
      }
      gate[i] = g;
    }
    pos = end + gap;
  }

  // Harmonics with a crude two-resonance envelope; phase accumulates so pitch
  // drift stays click-free.
  const double formant1 = 550.0 + 300.0 * rng.uniform();
  const double formant2 = 1500.0 + 900.0 * rng.uniform();
  const int num_harmonics = static_cast<int>(std::floor(0.45 * fs / f0_base));
  double phase_accum = 2.0 * kPi * rng.uniform();
  Eigen::ArrayXd harmonic_weight(num_harmonics);
  for (int h = 1; h <= num_harmonics; ++h) {
    const double f = h * f0_base;
    const double r1 = 1.0 / (1.0 + std::pow((f - formant1) / 200.0, 2.0));
    const double r2 = 0.6 / (1.0 + std::pow((f - formant2) / 300.0, 2.0));
    harmonic_weight[h - 1] = (r1 + r2 + 0.05) / h;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f0 = f0_base * (1.0 + 0.04 * std::sin(2.0 * kPi * drift_hz * t + drift_phase));
    phase_accum += 2.0 * kPi * f0 / fs;
    double sample = 0.0;
    for (int h = 1; h <= num_harmonics; ++h) {
      sample += harmonic_weight[h - 1] * std::sin(h * phase_accum);
    }
    // Weak aspiration component keeps silent-looking bins off exact zero.
    sample += 0.02 * rng.gaussian();
    out[i] = gate[i] * sample;
  }

  const double peak = out.abs().maxCoeff();
  if (peak > 0.0) out /= peak;
  return out;
}

Eigen::ArrayXd babble(Eigen::Index n, double sample_rate_hz, Rng &rng) {
  constexpr int kTalkers = 6;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  for (int t = 0; t < kTalkers; ++t) {
    Rng talker = rng.fork(static_cast<uint64_t>(t) + 1);
    out += speech_like(n, sample_rate_hz, talker);
  }
  const double scale = std::sqrt(out.square().mean());
  if (scale > 0.0) out /= scale;
  return out;
}

Eigen::ArrayXd resolve_source_audio(const std::string &ref, Eigen::Index n,
                                    double sample_rate_hz, Rng &rng) {
  if (ref.rfind("synth:", 0) == 0) {
    const std::string kind = ref.substr(6);
    if (kind == "white") {
      Eigen::ArrayXd x = white_noise(n, rng);
      const double scale = std::sqrt(x.square().mean());
      return scale > 0.0 ? Eigen::ArrayXd(x / scale) : x;
    }
    if (kind == "pink") return pink_noise(n, rng);
    if (kind == "speech") return speech_like(n, sample_rate_hz, rng);
    if (kind == "babble") return babble(n, sample_rate_hz, rng);
    throw std::invalid_argument("resolve_source_audio: unknown synthetic source '" + ref +
                                "'");
  }
  const MultichannelSignal wav = read_wav(ref);
  if (wav.sample_rate_hz != sample_rate_hz) {
    throw std::runtime_error("resolve_source_audio: sample rate of " + ref + " is " +
                             std::to_string(wav.sample_rate_hz) + " Hz, expected " +
                             std::to_string(sample_rate_hz) + " Hz (no resampler)");
  }
  if (wav.num_samples() == 0) {
    throw std::runtime_error("resolve_source_audio: empty file " + ref);
  }
  Eigen::ArrayXd mono = wav.samples.col(0);
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = mono[i % mono.size()];
  return out;
}

}  // namespace beamsteer
