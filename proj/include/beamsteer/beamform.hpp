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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "beamsteer/geometry.hpp"
#include "beamsteer/signal.hpp"
#include "beamsteer/tdoa.hpp"

namespace beamsteer {

/// wds: blind steering (GCC-PHAT + Viterbi). wds-aoi: pipeline weights with
/// delays mapped from an AOI track. ds-aoi: plain delay-and-sum on AOI
/// delays, uniform weights, short windows, no prefilter.
enum class BeamformMode { kWds, kWdsAoi, kDsAoi };

std::string to_string(BeamformMode mode);
BeamformMode beamform_mode_from_string(const std::string &name);

struct BeamformerConfig {
  BeamformMode mode = BeamformMode::kWds;
  double window_s = 0.0;  // 0 picks the mode default: 0.5, ds-aoi 0.05
  int n_candidates = 4;
  double noise_threshold_factor = 0.3;
  double viterbi_transition_weight = 1.0;
  double weight_adapt_rate = 0.05;
  double channel_elim_threshold = -1.0;  // negative picks 1 / (3 N)
  bool wiener_enabled = true;            // ds-aoi always runs without it

  double resolved_window_s() const;
  double resolved_elim_threshold(int num_channels) const;
  void validate() const;
};

/// One adaptation step: w <- (1-rho) * prev + rho * max(xcorr, 0); channels
/// whose xcorr falls below elim_threshold are zeroed this frame; the rest
/// renormalize to sum 1; a fully eliminated frame falls back to uniform.
Eigen::ArrayXd adapt_channel_weights(const Eigen::Ref<const Eigen::ArrayXd> &prev,
                                     const Eigen::Ref<const Eigen::ArrayXd> &frame_xcorr,
                                     double adapt_rate, double elim_threshold);

/// Sample-and-hold of the AOI at each frame time (clamped to [-90, 90]),
/// mapped through delays_from_aoi and rounded to integer samples.
DelayTrack aoi_to_delay_track(const AoiTrack &track, const ArrayGeometry &geom,
                              const Eigen::Ref<const Eigen::ArrayXd> &frame_times_s);

/// Weighted sum with integer-sample steering: per frame, y(k) = sum_n
/// w_n * x_n(k + tau_n) where tau_n is the channel's arrival lag (the
/// classical formula with the steering delay's sign folded in). Frames are
/// joined by 50% triangular overlap-add; output length = input length.
Eigen::ArrayXd beamform_sum(const MultichannelSignal &mc, const DelayTrack &delays,
                            const Eigen::Ref<const Eigen::ArrayXXd> &weights,
                            Eigen::Index window_samples);

struct PipelineDiagnostics {
  BeamformerConfig config;
  int reference_channel = 0;
  Eigen::ArrayXd frame_times_s;
  DelayTrack delays;
  Eigen::ArrayXXd weights;                 // rows = frames, cols = channels
  std::vector<int> eliminated_channels;    // zero weight in at least one frame
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::string> notes;
};

struct PipelineResult {
  MultichannelSignal output;  // mono
  PipelineDiagnostics diagnostics;
};

/// The full four-stage pipeline. Geometry supplies the physical lag bound
/// (and the delay mapping in the AOI modes). Mode wds forbids an AOI track;
/// the AOI modes require one; violations throw std::invalid_argument.
PipelineResult run_pipeline(const MultichannelSignal &mc, const BeamformerConfig &cfg,
                            const ArrayGeometry &geom,
                            const std::optional<AoiTrack> &aoi = std::nullopt);

}  // namespace beamsteer
