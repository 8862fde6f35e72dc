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

#include "beamsteer/dsp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "beamsteer/geometry.hpp"

namespace beamsteer {
namespace {

Eigen::FFT<double> &fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

double sinc(double u) {
  if (std::abs(u) < 1e-12) return 1.0;
  return std::sin(kPi * u) / (kPi * u);
}

}  // namespace

int next_pow2(int n) {
  if (n < 1) {
    throw std::invalid_argument("next_pow2: n must be positive");
  }
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

Eigen::ArrayXcd fft_forward(const Eigen::Ref<const Eigen::ArrayXd> &x, int nfft) {
  if (nfft < static_cast<int>(x.size())) {
    throw std::invalid_argument("fft_forward: nfft smaller than signal");
  }
  std::vector<double> padded(static_cast<size_t>(nfft), 0.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) padded[static_cast<size_t>(i)] = x[i];
  std::vector<std::complex<double>> spectrum;
  fft_engine().fwd(spectrum, padded);
  return Eigen::Map<Eigen::ArrayXcd>(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()));
}

Eigen::ArrayXd ifft_real(const Eigen::ArrayXcd &spectrum) {
  std::vector<std::complex<double>> bins(spectrum.data(), spectrum.data() + spectrum.size());
  std::vector<std::complex<double>> time;
  fft_engine().inv(time, bins);
  Eigen::ArrayXd out(static_cast<Eigen::Index>(time.size()));
  for (size_t i = 0; i < time.size(); ++i) out[static_cast<Eigen::Index>(i)] = time[i].real();
  return out;
}

Eigen::ArrayXd delayed_block(const Eigen::Ref<const Eigen::ArrayXd> &x,
                             Eigen::Index start, Eigen::Index len, double tau_samples) {
  constexpr int kHalf = 15;  // 31 taps
  const Eigen::Index n = x.size();
  const long coarse = std::lround(tau_samples);
  const double frac = tau_samples - static_cast<double>(coarse);

  Eigen::ArrayXd kernel(2 * kHalf + 1);
  for (int i = -kHalf; i <= kHalf; ++i) {
    const double u = static_cast<double>(i) - frac;
    const double window = 0.5 + 0.5 * std::cos(kPi * u / (kHalf + 1));
    kernel[i + kHalf] = sinc(u) * window;
  }

  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(len);
  for (Eigen::Index j = 0; j < len; ++j) {
    const Eigen::Index k = start + j;
    double acc = 0.0;
    for (int i = -kHalf; i <= kHalf; ++i) {
      const Eigen::Index m = k - coarse - i;
      if (m >= 0 && m < n) acc += kernel[i + kHalf] * x[m];
    }
    out[j] = acc;
  }
  return out;
}

Eigen::ArrayXd fractional_delay(const Eigen::Ref<const Eigen::ArrayXd> &x,
                                double tau_samples) {
  if (std::abs(tau_samples) >= static_cast<double>(x.size())) {
    throw std::domain_error("fractional_delay: |tau_samples| must be < length(x)");
  }
  return delayed_block(x, 0, x.size(), tau_samples);
}

}  // namespace beamsteer
