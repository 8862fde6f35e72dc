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

#include "beamsteer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace beamsteer {
namespace {

double capped_ratio_db(double signal_power, double residual_power) {
  if (signal_power <= 0.0) return -kMetricCapDb;
  if (residual_power <= signal_power * 1e-10) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(signal_power / residual_power));
}

}  // namespace

double snr_db(const Eigen::Ref<const Eigen::ArrayXd> &clean,
              const Eigen::Ref<const Eigen::ArrayXd> &estimate) {
  if (clean.size() != estimate.size()) {
    throw std::invalid_argument("snr_db: lengths differ");
  }
  const double clean_power = clean.square().sum();
  if (clean_power <= 0.0) throw std::domain_error("snr_db: silent clean reference");
  const double scale = (estimate * clean).sum() / clean_power;
  const double signal_power = scale * scale * clean_power;
  const double residual_power = (estimate - scale * clean).square().sum();
  return capped_ratio_db(signal_power, residual_power);
}

double snr_gain(const Eigen::Ref<const Eigen::ArrayXd> &clean_ref,
                const Eigen::Ref<const Eigen::ArrayXd> &noisy_best_channel,
                const Eigen::Ref<const Eigen::ArrayXd> &enhanced) {
  return snr_db(clean_ref, enhanced) - snr_db(clean_ref, noisy_best_channel);
}

int best_input_channel(const Eigen::Ref<const Eigen::ArrayXd> &clean,
                       const MultichannelSignal &mc) {
  mc.validate();
  int best = 0;
  double best_snr = -kMetricCapDb - 1.0;
  for (int ch = 0; ch < mc.num_channels(); ++ch) {
    const double s = snr_db(clean, mc.samples.col(ch));
    if (s > best_snr) {
      best_snr = s;
      best = ch;
    }
  }
  return best;
}

double si_sdr(const Eigen::Ref<const Eigen::ArrayXd> &estimate,
              const Eigen::Ref<const Eigen::ArrayXd> &reference) {
  if (estimate.size() != reference.size()) {
    throw std::invalid_argument("si_sdr: lengths differ");
  }
  const double ref_power = reference.square().sum();
  if (ref_power <= 0.0) throw std::domain_error("si_sdr: silent reference");
  const double scale = (estimate * reference).sum() / ref_power;
  const double target_power = scale * scale * ref_power;
  const double error_power = (estimate - scale * reference).square().sum();
  return capped_ratio_db(target_power, error_power);
}

Eigen::ArrayXd beam_pattern(const ArrayGeometry &geom, const DelayVector &steering,
                            const Eigen::Ref<const Eigen::ArrayXd> &weights,
                            double freq_hz,
                            const Eigen::Ref<const Eigen::ArrayXd> &angle_grid_deg) {
  geom.validate();
  if (!(freq_hz > 0.0) || freq_hz >= geom.sample_rate_hz / 2.0) {
    throw std::domain_error("beam_pattern: freq_hz must lie in (0, fs/2)");
  }
  if (weights.size() != geom.num_channels() ||
      steering.seconds.size() != geom.num_channels()) {
    throw std::invalid_argument("beam_pattern: weights/steering size mismatch");
  }
  const double weight_sum = std::abs(weights.sum());
  if (weight_sum <= 0.0) {
    throw std::invalid_argument("beam_pattern: weights must not sum to zero");
  }

  Eigen::ArrayXd gain_db(angle_grid_deg.size());
  for (Eigen::Index a = 0; a < angle_grid_deg.size(); ++a) {
    const double sin_phi = std::sin(deg_to_rad(angle_grid_deg[a]));
    std::complex<double> acc(0.0, 0.0);
    for (int ch = 0; ch < geom.num_channels(); ++ch) {
      const double residual_s =
          geom.mic_offsets_m[ch] * sin_phi / geom.sound_speed_mps - steering.seconds[ch];
      acc += weights[ch] * std::polar(1.0, 2.0 * kPi * freq_hz * residual_s);
    }
    gain_db[a] = 20.0 * std::log10(std::max(std::abs(acc) / weight_sum, 1e-12));
  }
  return gain_db;
}

AlignedSignal align_to_reference(const Eigen::Ref<const Eigen::ArrayXd> &reference,
                                 const Eigen::Ref<const Eigen::ArrayXd> &estimate,
                                 int max_lag) {
  if (reference.size() != estimate.size()) {
    throw std::invalid_argument("align_to_reference: lengths differ");
  }
  if (max_lag < 0 || max_lag >= reference.size()) {
    throw std::invalid_argument("align_to_reference: max_lag out of range");
  }
  const Eigen::Index n = reference.size();
  int best_lag = 0;
  double best_corr = -std::numeric_limits<double>::infinity();
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double corr = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index m = k + lag;  // estimate arrives late by `lag`
      if (m >= 0 && m < n) corr += reference[k] * estimate[m];
    }
    if (corr > best_corr) {
      best_corr = corr;
      best_lag = lag;
    }
  }
  AlignedSignal out;
  out.lag_samples = best_lag;
  out.samples = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index m = k + best_lag;
    if (m >= 0 && m < n) out.samples[k] = estimate[m];
  }
  return out;
}

void write_eval_report_json(const std::string &path, const EvalReport &report) {
  nlohmann::json doc;
  doc["seed"] = report.seed;
  doc["config_echo"] = report.config_echo;
  doc["alignment_lag_samples"] = report.alignment_lag_samples;
  doc["rows"] = nlohmann::json::array();
  for (const EvalRow &row : report.rows) {
    nlohmann::json item;
    item["preset"] = row.preset;
    item["mode"] = row.mode;
    item["snr_gain_db"] = row.snr_gain_db;
    item["si_sdr_db"] = row.si_sdr_db;
    item["mean_abs_aoi_deg"] =
        row.mean_abs_aoi_deg.has_value() ? nlohmann::json(*row.mean_abs_aoi_deg)
                                         : nlohmann::json(nullptr);
    item["wer"] = row.wer.has_value() ? nlohmann::json(*row.wer) : nlohmann::json(nullptr);
    doc["rows"].push_back(item);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_eval_report_json: cannot open " + path);
  out << doc.dump(2) << "\n";
}

void write_eval_report_csv(const std::string &path, const EvalReport &report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_eval_report_csv: cannot open " + path);
  out << "preset,mode,snr_gain_db,si_sdr_db,mean_abs_aoi_deg,wer\n";
  for (const EvalRow &row : report.rows) {
    out << row.preset << "," << row.mode << "," << row.snr_gain_db << ","
        << row.si_sdr_db << ",";
    if (row.mean_abs_aoi_deg.has_value()) out << *row.mean_abs_aoi_deg;
    out << ",";
    if (row.wer.has_value()) out << *row.wer;
    out << "\n";
  }
}

}  // namespace beamsteer
