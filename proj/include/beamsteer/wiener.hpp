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

/// None of these values come from measured hardware; they are conventional
/// single-channel noise-suppressor settings, all overridable.
struct WienerParams {
  double frame_s = 0.032;          // STFT frame, rounded up to a power of two
  double smoothing = 0.98;         // decision-directed a-priori SNR smoothing
  double noise_decile = 0.1;       // fraction of lowest-energy frames -> noise PSD
  double gain_floor = 0.1;         // spectral floor on the Wiener gain
};

/// Single-channel STFT Wiener suppressor: gain G = xi / (1 + xi) with a
/// decision-directed a-priori SNR estimate and a noise PSD taken from the
/// lowest-energy decile of frames. Output length equals input length;
/// all-zero input is returned unchanged.
Eigen::ArrayXd wiener_prefilter(const Eigen::Ref<const Eigen::ArrayXd> &x,
                                double sample_rate_hz,
                                const WienerParams &params = WienerParams{});

}  // namespace beamsteer
