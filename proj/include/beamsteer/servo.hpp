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
#include <deque>
#include <optional>

#include <Eigen/Dense>

#include "beamsteer/signal.hpp"
#include "beamsteer/synth.hpp"

namespace beamsteer {

struct ScenarioConfig;

/// Detector + head controller parameters. The detector is a geometric oracle
/// degraded by Gaussian angle noise, frame-rate sampling, delivery latency,
/// and dropouts; the controller is proportional with a deadband and a slew
/// rate limit.
struct ServoConfig {
  double detector_period_s = 0.1;
  double detector_latency_s = 0.15;
  double detector_noise_std_deg = 1.0;
  double detector_dropout_prob = 0.05;
  double deadband_deg = 1.0;
  double proportional_gain = 0.7;
  double head_rate_limit_deg_s = 120.0;
  double head_yaw_limit_deg = 90.0;  // symmetric, |yaw| <= limit
  uint64_t seed = 0;

  void validate() const;
};

struct TimedMeasurement {
  double due_s = 0.0;
  double offset_deg = 0.0;
};

struct ServoState {
  double head_yaw_deg = 0.0;
  double commanded_yaw_deg = 0.0;
  std::deque<TimedMeasurement> pending;
};

struct AoiStats {
  double mean_abs_deg = 0.0;
  double max_abs_deg = 0.0;
  double rms_deg = 0.0;
};

struct HeadSimResult {
  AoiTrack aoi;  // realized speech-source AOI per control tick
  AoiTrack yaw;  // realized head yaw per control tick
};

/// One detector frame: true angular offset of the source from the head MRA
/// plus Gaussian noise, or nullopt on dropout. Latency is the caller's
/// concern (the simulation queues the value until capture time + latency).
std::optional<double> measure_offset(double head_yaw_deg,
                                     const Eigen::Vector2d &head_position_m,
                                     const Eigen::Vector2d &source_position_m,
                                     const ServoConfig &cfg, Rng &rng);

/// Controller update on one delivered measurement. Issues a new commanded
/// yaw: unchanged inside the deadband, otherwise current yaw plus
/// gain*measurement clamped to rate_limit*dt and to the yaw limits. The
/// physical head is moved by the simulation loop, which slews toward the
/// command at the rate limit each tick.
ServoState servo_step(const ServoState &state, double measurement_deg, double dt_s,
                      const ServoConfig &cfg);

/// Closed-loop simulation at a fixed 100 Hz control tick over the scenario's
/// duration. Works for both head modes; static mode simply never moves.
HeadSimResult simulate_head(const ScenarioConfig &scenario);

/// Realized speech-source AOI track for a servo-mode scenario.
AoiTrack run_servo_sim(const ScenarioConfig &scenario, const ServoConfig &servo);

/// Time-weighted statistics (trapezoidal between samples). A single-entry
/// track yields that entry's values.
AoiStats aoi_stats(const AoiTrack &track);

}  // namespace beamsteer
