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

#include "beamsteer/signal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace beamsteer {

void MultichannelSignal::validate() const {
  if (sample_rate_hz <= 0.0) {
    throw std::invalid_argument("MultichannelSignal: sample_rate_hz must be positive");
  }
  if (samples.cols() < 1) {
    throw std::invalid_argument("MultichannelSignal: at least one channel required");
  }
  if (!samples.allFinite()) {
    throw std::invalid_argument("MultichannelSignal: samples must be finite");
  }
}

double AoiTrack::value_at(double t) const {
  if (empty()) {
    throw std::domain_error("AoiTrack::value_at: empty track");
  }
  if (t <= time_s[0]) return aoi_deg[0];
  Eigen::Index lo = 0;
  Eigen::Index hi = time_s.size() - 1;
  if (t >= time_s[hi]) return aoi_deg[hi];
  // Largest index with time_s[idx] <= t.
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (time_s[mid] <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return aoi_deg[lo];
}

void AoiTrack::validate() const {
  if (time_s.size() != aoi_deg.size()) {
    throw std::invalid_argument("AoiTrack: time_s and aoi_deg lengths differ");
  }
  for (Eigen::Index i = 1; i < time_s.size(); ++i) {
    if (!(time_s[i] > time_s[i - 1])) {
      throw std::invalid_argument("AoiTrack: time_s must be strictly increasing");
    }
  }
  if (time_s.size() > 0 && (!time_s.allFinite() || !aoi_deg.allFinite())) {
    throw std::invalid_argument("AoiTrack: entries must be finite");
  }
}

double rms(const Eigen::Ref<const Eigen::ArrayXd> &x) {
  if (x.size() == 0) return 0.0;
  return std::sqrt(x.square().mean());
}

double peak_abs(const Eigen::Ref<const Eigen::ArrayXd> &x) {
  if (x.size() == 0) return 0.0;
  return x.abs().maxCoeff();
}

void write_aoi_csv(const std::string &path, const AoiTrack &track) {
  track.validate();
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_aoi_csv: cannot open " + path);
  }
  out << "time_s,aoi_deg\n";
  char line[80];
  for (Eigen::Index i = 0; i < track.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f\n", track.time_s[i], track.aoi_deg[i]);
    out << line;
  }
  if (!out) {
    throw std::runtime_error("write_aoi_csv: write failed for " + path);
  }
}

AoiTrack read_aoi_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_aoi_csv: cannot open " + path);
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("read_aoi_csv: empty file " + path);
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "time_s,aoi_deg") {
    throw std::runtime_error("read_aoi_csv: unexpected header in " + path);
  }
  std::vector<double> times;
  std::vector<double> angles;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_field, a_field;
    if (!std::getline(row, t_field, ',') || !std::getline(row, a_field)) {
      throw std::runtime_error("read_aoi_csv: malformed line " + std::to_string(lineno) +
                               " in " + path);
    }
    try {
      times.push_back(std::stod(t_field));
      angles.push_back(std::stod(a_field));
    } catch (const std::exception &) {
      throw std::runtime_error("read_aoi_csv: non-numeric field on line " +
                               std::to_string(lineno) + " in " + path);
    }
  }
  AoiTrack track;
  track.time_s = Eigen::Map<Eigen::ArrayXd>(times.data(), static_cast<Eigen::Index>(times.size()));
  track.aoi_deg =
      Eigen::Map<Eigen::ArrayXd>(angles.data(), static_cast<Eigen::Index>(angles.size()));
  track.validate();
  return track;
}

}  // namespace beamsteer
