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

#include "beamsteer/servo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamsteer/geometry.hpp"
#include "beamsteer/scene.hpp"

namespace beamsteer {

namespace {
constexpr double kControlTickSeconds = 0.01;  // fixed 100 Hz loop
constexpr double kTimeEps = 1e-9;
}  // namespace

void ServoConfig::validate() const {
  if (detector_period_s <= 0.0) {
    throw std::invalid_argument("ServoConfig: detector_period_s must be positive");
  }
  if (detector_latency_s < 0.0) {
    throw std::invalid_argument("ServoConfig: detector_latency_s must be >= 0");
  }
  if (detector_noise_std_deg < 0.0) {
    throw std::invalid_argument("ServoConfig: detector_noise_std_deg must be >= 0");
  }
  if (detector_dropout_prob < 0.0 || detector_dropout_prob >= 1.0) {
    throw std::invalid_argument("ServoConfig: detector_dropout_prob must be in [0, 1)");
  }
  if (deadband_deg < 0.0) {
    throw std::invalid_argument("ServoConfig: deadband_deg must be >= 0");
  }
  if (proportional_gain <= 0.0 || proportional_gain > 1.0) {
    throw std::invalid_argument("ServoConfig: proportional_gain must be in (0, 1]");
  }
  if (head_rate_limit_deg_s <= 0.0) {
    throw std::invalid_argument("ServoConfig: head_rate_limit_deg_s must be positive");
  }
  if (head_yaw_limit_deg <= 0.0) {
    throw std::invalid_argument("ServoConfig: head_yaw_limit_deg must be positive");
  }
}

std::optional<double> measure_offset(double head_yaw_deg,
                                     const Eigen::Vector2d &head_position_m,
                                     const Eigen::Vector2d &source_position_m,
                                     const ServoConfig &cfg, Rng &rng) {
  const double true_offset = aoi_from_pose(head_yaw_deg, head_position_m, source_position_m);
  if (rng.uniform() < cfg.detector_dropout_prob) return std::nullopt;
  return true_offset + cfg.detector_noise_std_deg * rng.gaussian();
}

ServoState servo_step(const ServoState &state, double measurement_deg, double dt_s,
                      const ServoConfig &cfg) {
  if (dt_s <= 0.0) throw std::domain_error("servo_step: dt must be positive");
  ServoState next = state;
  if (std::abs(measurement_deg) <= cfg.deadband_deg) {
    // Target centered: halt where we are.
    next.commanded_yaw_deg = state.head_yaw_deg;
    return next;
  }
  const double budget = cfg.head_rate_limit_deg_s * dt_s;
  const double change =
      std::clamp(cfg.proportional_gain * measurement_deg, -budget, budget);
  next.commanded_yaw_deg = std::clamp(state.head_yaw_deg + change,
                                      -cfg.head_yaw_limit_deg, cfg.head_yaw_limit_deg);
  return next;
}

HeadSimResult simulate_head(const ScenarioConfig &scenario) {
  scenario.servo.validate();
  const ServoConfig &servo = scenario.servo;
  const bool active = scenario.head_mode == HeadMode::kServo;
  const Eigen::Index num_ticks =
      static_cast<Eigen::Index>(std::llround(scenario.duration_s / kControlTickSeconds));

  HeadSimResult result;
  result.aoi.time_s.resize(num_ticks + 1);
  result.aoi.aoi_deg.resize(num_ticks + 1);
  result.yaw.time_s.resize(num_ticks + 1);
  result.yaw.aoi_deg.resize(num_ticks + 1);

  Rng rng(servo.seed);
  ServoState state;
  double next_capture = 0.0;
  const double tick_budget = servo.head_rate_limit_deg_s * kControlTickSeconds;

  for (Eigen::Index k = 0; k <= num_ticks; ++k) {
    const double t = std::min(k * kControlTickSeconds, scenario.duration_s);
    const Eigen::Vector2d base = base_pose_at(scenario, t);
    result.yaw.time_s[k] = t;
    result.yaw.aoi_deg[k] = state.head_yaw_deg;
    result.aoi.time_s[k] = t;
    result.aoi.aoi_deg[k] =
        aoi_from_pose(state.head_yaw_deg, base, scenario.speech_source.position_m);
    if (k == num_ticks || !active) continue;

    if (t >= next_capture - kTimeEps) {
      const std::optional<double> m =
          measure_offset(state.head_yaw_deg, base, scenario.speech_source.position_m, servo, rng);
      if (m.has_value()) {
        state.pending.push_back({t + servo.detector_latency_s, *m});
      }
      next_capture += servo.detector_period_s;
    }
    while (!state.pending.empty() && state.pending.front().due_s <= t + kTimeEps) {
      const double m = state.pending.front().offset_deg;
      state.pending.pop_front();
      state = servo_step(state, m, servo.detector_period_s, servo);
    }
    const double err = state.commanded_yaw_deg - state.head_yaw_deg;
    state.head_yaw_deg += std::clamp(err, -tick_budget, tick_budget);
  }
  return result;
}

AoiTrack run_servo_sim(const ScenarioConfig &scenario, const ServoConfig &servo) {
  if (scenario.head_mode != HeadMode::kServo) {
    throw std::invalid_argument("run_servo_sim: scenario head_mode must be servo");
  }
  ScenarioConfig sc = scenario;
  sc.servo = servo;
  return simulate_head(sc).aoi;
}

AoiStats aoi_stats(const AoiTrack &track) {
  track.validate();
  if (track.empty()) throw std::domain_error("aoi_stats: empty track");
  AoiStats stats;
  stats.max_abs_deg = track.aoi_deg.abs().maxCoeff();
  if (track.size() == 1) {
    stats.mean_abs_deg = stats.max_abs_deg;
    stats.rms_deg = stats.max_abs_deg;
    return stats;
  }
  double total_time = 0.0;
  double integral_abs = 0.0;
  double integral_sq = 0.0;
  for (Eigen::Index i = 1; i < track.size(); ++i) {
    const double dt = track.time_s[i] - track.time_s[i - 1];
    const double a0 = track.aoi_deg[i - 1];
    const double a1 = track.aoi_deg[i];
    integral_abs += 0.5 * (std::abs(a0) + std::abs(a1)) * dt;
    integral_sq += 0.5 * (a0 * a0 + a1 * a1) * dt;
    total_time += dt;
  }
  stats.mean_abs_deg = integral_abs / total_time;
  stats.rms_deg = std::sqrt(integral_sq / total_time);
  return stats;
}

}  // namespace beamsteer
