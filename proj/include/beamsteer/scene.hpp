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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamsteer/geometry.hpp"
#include "beamsteer/servo.hpp"
#include "beamsteer/signal.hpp"

namespace beamsteer {

enum class HeadMode { kStatic0Deg, kServo };

struct SourceConfig {
  Eigen::Vector2d position_m{0.0, 2.0};
  std::string audio = "synth:speech";
  double snr_db = 5.0;  // noise sources only; ignored for the speech source
};

/// Full description of one testbed scene: a robot base shuttling between P1
/// and P3 under a trapezoidal velocity profile, a head that is either fixed
/// at 0 deg yaw or servo-driven, one speech source, and up to two noise
/// sources mixed at configured SNRs.
struct ScenarioConfig {
  ArrayGeometry geometry = ArrayGeometry::default_array();
  Eigen::Vector2d p1_m{-1.0, 0.0};
  Eigen::Vector2d p3_m{1.0, 0.0};
  Eigen::Vector2d p2_m{0.0, 0.0};  // midpoint of P1..P3
  double v_max_mps = 0.45;
  double accel_mps2 = 0.9;
  HeadMode head_mode = HeadMode::kStatic0Deg;
  SourceConfig speech_source;
  std::vector<SourceConfig> noise_sources;
  double duration_s = 20.0;
  uint64_t seed = 0;
  ServoConfig servo;

  // Optional extras, all off by default.
  bool ego_noise_enabled = false;
  double ego_noise_snr_db = 20.0;
  double rt60_s = 0.0;            // 0 disables the decay tail
  double utterance_gap_s = 0.0;   // 0 disables utterance pacing
  double utterance_len_s = 2.5;   // on-time per utterance when pacing is on

  std::string preset_name;  // empty when hand-built

  void validate() const;
};

struct SceneResult {
  MultichannelSignal mixture;        // speech + scaled noises (+ extras)
  MultichannelSignal clean_speech;   // speech image alone, same scaling
  AoiTrack ground_truth_aoi;         // true speech AOI at the hop rate
  AoiTrack head_yaw;                 // realized yaw at the hop rate
  std::vector<std::string> warnings;
  bool soft_limited = false;
  double soft_limit_scale = 1.0;
};

/// Base position at time t under the periodic trapezoidal profile
/// P1 -> P3 -> P1. Degenerate P1 == P3 means a stationary base.
Eigen::Vector2d base_pose_at(const ScenarioConfig &cfg, double t_s);

/// Travel time for one leg P1 -> P3 (half the profile period).
double base_leg_duration_s(const ScenarioConfig &cfg);

/// clean + g * noise with g chosen so 20*log10(rms(clean)/(g*rms(noise)))
/// equals snr_db.
Eigen::ArrayXd mix_at_snr(const Eigen::Ref<const Eigen::ArrayXd> &clean,
                          const Eigen::Ref<const Eigen::ArrayXd> &noise, double snr_db);

/// Renders the scene: per 10 ms hop, per source, planar-wave fractional
/// delays from the instantaneous AOI, raised-cosine overlap-add, SNR mixing,
/// ground-truth AOI track. Deterministic per (config, seed).
SceneResult synthesize_scene(const ScenarioConfig &cfg);

}  // namespace beamsteer
