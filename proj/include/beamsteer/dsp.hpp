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

#include <Eigen/Dense>

namespace beamsteer {

int next_pow2(int n);

/// Full-spectrum FFT of a real signal zero-padded to nfft bins.
Eigen::ArrayXcd fft_forward(const Eigen::Ref<const Eigen::ArrayXd> &x, int nfft);

/// Inverse FFT, real part. Includes the 1/N factor.
Eigen::ArrayXd ifft_real(const Eigen::ArrayXcd &spectrum);

/// Band-limited delay: y[k] = x(k - tau_samples), windowed-sinc interpolation
/// with a 31-tap Hann-windowed kernel. Integer tau reduces to an exact shift.
/// Out-of-range samples read as zero.
Eigen::ArrayXd fractional_delay(const Eigen::Ref<const Eigen::ArrayXd> &x,
                                double tau_samples);

/// Windowed view of the same interpolation: y[j] = x(start + j - tau_samples)
/// for j in [0, len), indices outside x reading as zero. Lets a caller delay
/// a region of a long signal without windowing the input first.
Eigen::ArrayXd delayed_block(const Eigen::Ref<const Eigen::ArrayXd> &x,
                             Eigen::Index start, Eigen::Index len, double tau_samples);

}  // namespace beamsteer
