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
//
// Brute-force reference implementations used to cross-check the library.
// Everything here is written the slow, obvious way on purpose and must not
// call into the code under test (beyond plain data types).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "beamsteer/tdoa.hpp"

namespace oracle {

// argmax over integer lags of sum_k ref[k] * sig[k + lag], zero padded.
// Positive result means `sig` lags (arrives later than) `ref`.
inline int xcorr_best_lag(const Eigen::ArrayXd &ref, const Eigen::ArrayXd &sig,
                          int max_lag) {
  const Eigen::Index n = std::min(ref.size(), sig.size());
  double best = -std::numeric_limits<double>::infinity();
  int best_lag = 0;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index j = k + lag;
      if (j >= 0 && j < sig.size()) acc += ref[k] * sig[j];
    }
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  return best_lag;
}

// Same cross-correlation with a parabolic refinement around the integer peak.
inline double xcorr_best_lag_parabolic(const Eigen::ArrayXd &ref,
                                       const Eigen::ArrayXd &sig, int max_lag) {
  const Eigen::Index n = std::min(ref.size(), sig.size());
  auto corr_at = [&](int lag) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index j = k + lag;
      if (j >= 0 && j < sig.size()) acc += ref[k] * sig[j];
    }
    return acc;
  };
  int best_lag = xcorr_best_lag(ref, sig, max_lag);
  if (std::abs(best_lag) >= max_lag) return best_lag;
  const double ym = corr_at(best_lag - 1);
  const double y0 = corr_at(best_lag);
  const double yp = corr_at(best_lag + 1);
  const double denom = ym - 2.0 * y0 + yp;
  if (std::abs(denom) < 1e-30) return best_lag;
  return best_lag + 0.5 * (ym - yp) / denom;
}

// Exhaustive counterpart of viterbi_select_channel: same kept-frame rule,
// best path found by enumerating every candidate combination.
inline std::vector<int> exhaustive_viterbi(
    const std::vector<std::vector<beamsteer::TdoaCandidate>> &frames,
    double transition_weight, double noise_threshold_factor, int max_lag) {
  const size_t num_frames = frames.size();

  // Kept frames: non-empty and best score at or above the threshold factor
  // times the running median of best scores seen so far (current included).
  std::vector<bool> kept(num_frames, false);
  std::vector<double> best_scores;
  for (size_t f = 0; f < num_frames; ++f) {
    if (frames[f].empty()) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto &c : frames[f]) best = std::max(best, c.score);
    best_scores.push_back(best);
    std::vector<double> sorted = best_scores;
    std::sort(sorted.begin(), sorted.end());
    const size_t m = sorted.size();
    const double median =
        (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    kept[f] = best >= noise_threshold_factor * median;
  }

  std::vector<size_t> kept_idx;
  for (size_t f = 0; f < num_frames; ++f) {
    if (kept[f]) kept_idx.push_back(f);
  }

  std::vector<int> path_lags(kept_idx.size(), 0);
  if (!kept_idx.empty()) {
    std::vector<size_t> choice(kept_idx.size(), 0);
    std::vector<int> best_path;
    double best_total = -std::numeric_limits<double>::infinity();
    while (true) {
      double total = 0.0;
      std::vector<int> lags(kept_idx.size());
      for (size_t i = 0; i < kept_idx.size(); ++i) {
        const auto &cand = frames[kept_idx[i]][choice[i]];
        lags[i] = cand.lag_samples;
        total += cand.score;
        if (i > 0) {
          total -= transition_weight * std::abs(lags[i] - lags[i - 1]) /
                   static_cast<double>(max_lag);
        }
      }
      if (total > best_total) {
        best_total = total;
        best_path = lags;
      }
      size_t pos = 0;
      while (pos < choice.size()) {
        if (++choice[pos] < frames[kept_idx[pos]].size()) break;
        choice[pos] = 0;
        ++pos;
      }
      if (pos == choice.size()) break;
    }
    path_lags = best_path;
  }

  // Hold-fill the dropped frames from the previous selected lag.
  std::vector<int> out(num_frames, 0);
  int prev = 0;
  size_t next_kept = 0;
  for (size_t f = 0; f < num_frames; ++f) {
    if (next_kept < kept_idx.size() && kept_idx[next_kept] == f) {
      prev = path_lags[next_kept];
      ++next_kept;
    }
    out[f] = prev;
  }
  return out;
}

// Segmental SNR in dB: mean over 20 ms frames of the per-frame SNR, each
// frame clamped to [-10, 35] dB, frames with negligible clean energy skipped.
inline double segmental_snr_db(const Eigen::ArrayXd &clean,
                               const Eigen::ArrayXd &processed, double fs) {
  const Eigen::Index frame = static_cast<Eigen::Index>(std::lround(0.02 * fs));
  const Eigen::Index n = std::min(clean.size(), processed.size());
  double acc = 0.0;
  int count = 0;
  for (Eigen::Index start = 0; start + frame <= n; start += frame) {
    const double sig = clean.segment(start, frame).square().sum();
    if (sig < 1e-12) continue;
    const double err =
        (clean.segment(start, frame) - processed.segment(start, frame)).square().sum();
    const double snr = 10.0 * std::log10(sig / std::max(err, 1e-20));
    acc += std::clamp(snr, -10.0, 35.0);
    ++count;
  }
  return count > 0 ? acc / count : 0.0;
}

// Independent trapezoidal profile: distance travelled from rest after time t
// on one leg of length `len` (accelerate, cruise, decelerate; triangular
// when the leg is too short to reach v_max).
inline double trapezoid_distance(double t, double len, double v_max, double accel) {
  double t_acc = v_max / accel;
  double d_acc = 0.5 * accel * t_acc * t_acc;
  if (2.0 * d_acc >= len) {
    d_acc = len / 2.0;
    t_acc = std::sqrt(2.0 * d_acc / accel);
  }
  const double d_cruise = len - 2.0 * d_acc;
  const double v_peak = accel * t_acc;
  const double t_cruise = v_peak > 0.0 ? d_cruise / v_peak : 0.0;
  const double t_total = 2.0 * t_acc + t_cruise;
  t = std::clamp(t, 0.0, t_total);
  if (t <= t_acc) return 0.5 * accel * t * t;
  if (t <= t_acc + t_cruise) return d_acc + v_peak * (t - t_acc);
  const double td = t - t_acc - t_cruise;
  return d_acc + d_cruise + v_peak * td - 0.5 * accel * td * td;
}

}  // namespace oracle
