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

#include "beamsteer/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace beamsteer {

double wrap_degrees(double deg) {
  double wrapped = std::fmod(deg, 360.0);
  if (wrapped <= -180.0) wrapped += 360.0;
  if (wrapped > 180.0) wrapped -= 360.0;
  return wrapped;
}

ArrayGeometry ArrayGeometry::from_positions(const Eigen::ArrayXd &positions_m,
                                            int reference_index,
                                            double sound_speed_mps,
                                            double sample_rate_hz) {
  if (reference_index < 0 || reference_index >= positions_m.size()) {
    throw std::invalid_argument("geometry: reference_index " +
                                std::to_string(reference_index) +
                                " out of range for " +
                                std::to_string(positions_m.size()) +
                                " microphones");
  }
  ArrayGeometry geom;
  geom.mic_offsets_m = positions_m - positions_m[reference_index];
  geom.mic_offsets_m[reference_index] = 0.0;  // exact zero, not a rounding residue
  geom.reference_index = reference_index;
  geom.sound_speed_mps = sound_speed_mps;
  geom.sample_rate_hz = sample_rate_hz;
  geom.validate();
  return geom;
}

ArrayGeometry ArrayGeometry::default_array() {
  Eigen::ArrayXd positions(4);
  positions << -0.113, 0.036, 0.076, 0.113;
  return from_positions(positions, 0);
}

int ArrayGeometry::max_lag_samples(int slack_samples) const {
  const double lag = aperture_m() / sound_speed_mps * sample_rate_hz;
  return static_cast<int>(std::ceil(lag)) + slack_samples;
}

void ArrayGeometry::validate() const {
  if (mic_offsets_m.size() < 2) {
    throw std::invalid_argument("geometry: need at least 2 microphones, got " +
                                std::to_string(mic_offsets_m.size()));
  }
  if (reference_index < 0 || reference_index >= mic_offsets_m.size()) {
    throw std::invalid_argument("geometry: reference_index out of range");
  }
  if (mic_offsets_m[reference_index] != 0.0) {
    throw std::invalid_argument(
        "geometry: offset at the reference microphone must be exactly 0");
  }
  if (!mic_offsets_m.isFinite().all()) {
    throw std::invalid_argument("geometry: non-finite microphone offset");
  }
  if (!(sound_speed_mps > 0.0)) {
    throw std::invalid_argument("geometry: sound_speed_mps must be > 0");
  }
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("geometry: sample_rate_hz must be > 0");
  }
  if (!(aperture_m() > 0.0)) {
    throw std::invalid_argument("geometry: array length must be > 0");
  }
}

DelayVector delays_from_aoi(const ArrayGeometry &geom, double aoi_deg) {
  if (!(aoi_deg >= -90.0 && aoi_deg <= 90.0)) {
    throw std::domain_error("delays_from_aoi: angle " + std::to_string(aoi_deg) +
                            " outside [-90, 90] degrees");
  }
  DelayVector delays;
  delays.seconds =
      geom.mic_offsets_m * (std::sin(deg_to_rad(aoi_deg)) / geom.sound_speed_mps);
  delays.seconds[geom.reference_index] = 0.0;
  delays.samples = delays.seconds * geom.sample_rate_hz;
  return delays;
}

double aoi_from_pose(double head_yaw_deg,
                     const Eigen::Vector2d &head_position_m,
                     const Eigen::Vector2d &source_position_m) {
  const Eigen::Vector2d to_source = source_position_m - head_position_m;
  if (to_source.squaredNorm() <= 0.0) {
    throw std::domain_error("aoi_from_pose: source coincides with head position");
  }
  // Bearing measured clockwise from +y, same convention as the yaw.
  const double bearing_deg = rad_to_deg(std::atan2(to_source.x(), to_source.y()));
  return wrap_degrees(bearing_deg - head_yaw_deg);
}

}  // namespace beamsteer
