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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamsteer/geometry.hpp"
#include "beamsteer/signal.hpp"

namespace beamsteer {

constexpr double kMetricCapDb = 100.0;

/// SNR of `estimate` against `clean` after a least-squares gain fit:
/// 10*log10(|a c|^2 / |estimate - a c|^2) with a = <estimate, c> / <c, c>,
/// capped at +100 dB. Throws std::domain_error on a silent clean reference.
double snr_db(const Eigen::Ref<const Eigen::ArrayXd> &clean,
              const Eigen::Ref<const Eigen::ArrayXd> &estimate);

/// SNR(enhanced) - SNR(best input channel), both against the clean
/// reference. The caller picks the best input channel (see
/// best_input_channel).
double snr_gain(const Eigen::Ref<const Eigen::ArrayXd> &clean_ref,
                const Eigen::Ref<const Eigen::ArrayXd> &noisy_best_channel,
                const Eigen::Ref<const Eigen::ArrayXd> &enhanced);

/// Channel of `mc` with the highest snr_db against the clean reference.
int best_input_channel(const Eigen::Ref<const Eigen::ArrayXd> &clean,
                       const MultichannelSignal &mc);

/// Scale-invariant SDR, capped at +100 dB. Throws std::domain_error on a
/// silent reference.
double si_sdr(const Eigen::Ref<const Eigen::ArrayXd> &estimate,
              const Eigen::Ref<const Eigen::ArrayXd> &reference);

/// Array-factor gain over an angle grid, in dB relative to the steered
/// direction: 20*log10(|sum_n w_n exp(j 2 pi f (delta_n sin(phi)/c -
/// tau_n))| / |sum_n w_n|). Throws std::domain_error when freq_hz is not
/// below fs/2.
Eigen::ArrayXd beam_pattern(const ArrayGeometry &geom, const DelayVector &steering,
                            const Eigen::Ref<const Eigen::ArrayXd> &weights,
                            double freq_hz,
                            const Eigen::Ref<const Eigen::ArrayXd> &angle_grid_deg);

/// Integer lag in [-max_lag, max_lag] maximizing the cross-correlation of
/// (reference, estimate), and the estimate shifted by that lag (zero
/// padded). Run before metrics when the processing chain may have moved the
/// signal globally.
struct AlignedSignal {
  Eigen::ArrayXd samples;
  int lag_samples = 0;
};
AlignedSignal align_to_reference(const Eigen::Ref<const Eigen::ArrayXd> &reference,
                                 const Eigen::Ref<const Eigen::ArrayXd> &estimate,
                                 int max_lag);

struct EvalRow {
  std::string preset;  // empty when the scene was hand-built
  std::string mode;
  double snr_gain_db = 0.0;
  double si_sdr_db = 0.0;
  std::optional<double> mean_abs_aoi_deg;
  std::optional<double> wer;  // reserved for an external ASR harness
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::string config_echo;
  uint64_t seed = 0;
  int alignment_lag_samples = 0;
};

void write_eval_report_json(const std::string &path, const EvalReport &report);
void write_eval_report_csv(const std::string &path, const EvalReport &report);

}  // namespace beamsteer
