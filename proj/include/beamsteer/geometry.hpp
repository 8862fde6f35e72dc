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

// Conventions used throughout the toolkit.
//
// All angles at public interfaces are degrees; internal math is radians.
//
// World frame: 2-D (x, y) in meters. Head yaw is measured clockwise from the
// +y axis, so the main response axis (MRA) of a head at yaw psi is the unit
// vector (sin psi, cos psi); yaw 0 points along +y. The angle of incidence
// (AOI) of a source is the signed bearing of the head-to-source direction
// relative to the MRA, positive when the source lies toward +x for an MRA
// pointing along +y. Increasing the yaw by phi decreases the AOI by phi.
//
// The microphone axis is perpendicular to the MRA, with positive offsets on
// the head's -x side for an MRA pointing along +y. Offsets are signed
// distances along that axis from the reference microphone. A planar
// wavefront from a positive AOI therefore reaches positive-offset
// microphones late: delta_n * sin(aoi) / c is the arrival lag of microphone
// n relative to the reference, and steering compensates by advancing each
// channel by its lag.

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle in degrees into (-180, 180].
double wrap_degrees(double deg);

/// Linear microphone array: signed offsets from the reference microphone
/// along the array axis, propagation speed, and sample rate.
struct ArrayGeometry {
  Eigen::ArrayXd mic_offsets_m;  // exactly 0 at reference_index
  int reference_index = 0;
  double sound_speed_mps = 343.0;
  double sample_rate_hz = 16000.0;

  /// Builds a geometry from microphone positions along the array axis in an
  /// arbitrary origin; positions are re-referenced so that the reference
  /// microphone sits at offset 0 exactly.
  static ArrayGeometry from_positions(const Eigen::ArrayXd &positions_m,
                                      int reference_index,
                                      double sound_speed_mps = 343.0,
                                      double sample_rate_hz = 16000.0);

  /// Default 4-microphone linear layout (positions -0.113, 0.036, 0.076,
  /// 0.113 m along the axis, reference microphone 0). The spacing is a
  /// stand-in for a small consumer array, not a measured device; override it
  /// through the scenario config for real hardware.
  static ArrayGeometry default_array();

  int num_channels() const { return static_cast<int>(mic_offsets_m.size()); }

  /// Distance between the outermost microphones.
  double aperture_m() const {
    return mic_offsets_m.maxCoeff() - mic_offsets_m.minCoeff();
  }

  /// Largest physically possible inter-microphone lag in samples, plus slack.
  int max_lag_samples(int slack_samples = 2) const;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

/// Per-channel steering delays, in seconds and in (fractional) samples.
struct DelayVector {
  Eigen::ArrayXd seconds;
  Eigen::ArrayXd samples;
};

/// Maps an angle of incidence to per-channel delays under the far-field
/// planar-wavefront model: tau_n = offset_n * sin(aoi) / c, the arrival lag
/// of channel n relative to the reference. The reference channel delay is
/// exactly 0. Throws std::domain_error when `aoi_deg` is outside [-90, 90]
/// (end-fire ambiguity of a linear array).
DelayVector delays_from_aoi(const ArrayGeometry &geom, double aoi_deg);

/// Signed angle in degrees, in (-180, 180], between the MRA at
/// `head_yaw_deg` and the direction from `head_position_m` to
/// `source_position_m`. Throws std::domain_error when the source coincides
/// with the head position.
double aoi_from_pose(double head_yaw_deg,
                     const Eigen::Vector2d &head_position_m,
                     const Eigen::Vector2d &source_position_m);

}  // namespace beamsteer
