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

#include "beamsteer/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "beamsteer/dsp.hpp"
#include "beamsteer/geometry.hpp"

namespace beamsteer {

Eigen::ArrayXd wiener_prefilter(const Eigen::Ref<const Eigen::ArrayXd> &x,
                                double sample_rate_hz, const WienerParams &params) {
  if (sample_rate_hz <= 0.0) {
    throw std::invalid_argument("wiener_prefilter: sample_rate_hz must be positive");
  }
  const Eigen::Index n = x.size();
  const int nfft = next_pow2(static_cast<int>(std::lround(params.frame_s * sample_rate_hz)));
  if (n < nfft) {
    throw std::domain_error("wiener_prefilter: input shorter than one STFT frame");
  }
  if ((x != 0.0).count() == 0) return x;

  const Eigen::Index hop = nfft / 2;
  const Eigen::Index num_frames = (n + hop - 1) / hop;

  Eigen::ArrayXd window(nfft);
  for (int j = 0; j < nfft; ++j) {
    window[j] = 0.5 - 0.5 * std::cos(2.0 * kPi * (j + 0.5) / nfft);
  }

  // Analysis pass: windowed spectra and per-frame energies.
  std::vector<Eigen::ArrayXcd> spectra(static_cast<size_t>(num_frames));
  Eigen::ArrayXd energy(num_frames);
  for (Eigen::Index f = 0; f < num_frames; ++f) {
    const Eigen::Index start = f * hop;
    Eigen::ArrayXd frame = Eigen::ArrayXd::Zero(nfft);
    const Eigen::Index len = std::min<Eigen::Index>(nfft, n - start);
    frame.head(len) = x.segment(start, len);
    frame *= window;
    spectra[static_cast<size_t>(f)] = fft_forward(frame, nfft);
    energy[f] = spectra[static_cast<size_t>(f)].abs2().sum();
  }

  // Noise PSD: mean periodogram of the lowest-energy decile of frames.
  const Eigen::Index quiet_count = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::ceil(params.noise_decile * num_frames)));
  std::vector<Eigen::Index> order(static_cast<size_t>(num_frames));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return energy[a] < energy[b]; });
  Eigen::ArrayXd noise_psd = Eigen::ArrayXd::Zero(nfft);
  for (Eigen::Index q = 0; q < quiet_count; ++q) {
    noise_psd += spectra[static_cast<size_t>(order[static_cast<size_t>(q)])].abs2();
  }
  noise_psd /= static_cast<double>(quiet_count);
  noise_psd = noise_psd.max(1e-20);

  // Decision-directed gain track and weighted overlap-add synthesis.
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd norm = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd prev_clean_psd = noise_psd;  // xi starts near 1
  for (Eigen::Index f = 0; f < num_frames; ++f) {
    const Eigen::ArrayXcd &spectrum = spectra[static_cast<size_t>(f)];
    const Eigen::ArrayXd gamma = spectrum.abs2() / noise_psd;
    const Eigen::ArrayXd xi = params.smoothing * (prev_clean_psd / noise_psd) +
                              (1.0 - params.smoothing) * (gamma - 1.0).max(0.0);
    const Eigen::ArrayXd gain = (xi / (1.0 + xi)).max(params.gain_floor);
    prev_clean_psd = gain.square() * spectrum.abs2();

    const Eigen::ArrayXd frame = ifft_real(spectrum * gain.cast<std::complex<double>>());
    const Eigen::Index start = f * hop;
    const Eigen::Index len = std::min<Eigen::Index>(nfft, n - start);
    out.segment(start, len) += window.head(len) * frame.head(len);
    norm.segment(start, len) += window.head(len).square();
  }
  return (norm > 1e-12).select(out / norm, 0.0);
}

}  // namespace beamsteer
