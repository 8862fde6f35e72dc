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

#include <string>

#include <Eigen/Dense>

namespace beamsteer {

/// N synchronized sample streams at a common rate, one column per channel.
/// Samples are floating point, nominally in [-1, 1].
struct MultichannelSignal {
  double sample_rate_hz = 16000.0;
  Eigen::ArrayXXd samples;  // rows = time, cols = channels

  Eigen::Index num_samples() const { return samples.rows(); }
  int num_channels() const { return static_cast<int>(samples.cols()); }
  double duration_s() const {
    return static_cast<double>(samples.rows()) / sample_rate_hz;
  }
  void validate() const;
};

/// Timestamped angle-of-incidence sequence with strictly increasing times.
struct AoiTrack {
  Eigen::ArrayXd time_s;
  Eigen::ArrayXd aoi_deg;

  Eigen::Index size() const { return time_s.size(); }
  bool empty() const { return time_s.size() == 0; }

  /// Sample-and-hold lookup: value of the most recent entry at or before `t`;
  /// times before the first entry hold the first value.
  double value_at(double t) const;

  void validate() const;
};

double rms(const Eigen::Ref<const Eigen::ArrayXd> &x);
double peak_abs(const Eigen::Ref<const Eigen::ArrayXd> &x);

/// CSV with a `time_s,aoi_deg` header and 6 decimal places per field.
void write_aoi_csv(const std::string &path, const AoiTrack &track);
AoiTrack read_aoi_csv(const std::string &path);

}  // namespace beamsteer
