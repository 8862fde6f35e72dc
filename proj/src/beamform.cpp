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

#include "beamsteer/beamform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "beamsteer/wiener.hpp"

namespace beamsteer {
namespace {

constexpr double kOutputPeakDbfs = -3.0;

double elapsed_s(const std::chrono::steady_clock::time_point &since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Frames start every hop = window/2 samples; the tail frame may be short.
Eigen::Index frame_count(Eigen::Index n, Eigen::Index hop) {
  return (n + hop - 1) / hop;
}

Eigen::ArrayXd aligned_frame(const Eigen::Ref<const Eigen::ArrayXXd> &samples, int ch,
                             Eigen::Index start, Eigen::Index len, int lag) {
  const Eigen::Index n = samples.rows();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(len);
  for (Eigen::Index j = 0; j < len; ++j) {
    const Eigen::Index m = start + j + lag;  // advance by the arrival lag
    if (m >= 0 && m < n) out[j] = samples(m, ch);
  }
  return out;
}

}  // namespace

std::string to_string(BeamformMode mode) {
  switch (mode) {
    case BeamformMode::kWds: return "wds";
    case BeamformMode::kWdsAoi: return "wds-aoi";
    case BeamformMode::kDsAoi: return "ds-aoi";
  }
  throw std::logic_error("to_string: bad BeamformMode");
}

BeamformMode beamform_mode_from_string(const std::string &name) {
  if (name == "wds") return BeamformMode::kWds;
  if (name == "wds-aoi") return BeamformMode::kWdsAoi;
  if (name == "ds-aoi") return BeamformMode::kDsAoi;
  throw std::invalid_argument("unknown beamformer mode '" + name +
                              "' (expected wds, wds-aoi, or ds-aoi)");
}

double BeamformerConfig::resolved_window_s() const {
  if (window_s > 0.0) return window_s;
  return mode == BeamformMode::kDsAoi ? 0.05 : 0.5;
}

double BeamformerConfig::resolved_elim_threshold(int num_channels) const {
  if (channel_elim_threshold >= 0.0) return channel_elim_threshold;
  return 1.0 / (3.0 * num_channels);
}

void BeamformerConfig::validate() const {
  if (window_s < 0.0) throw std::invalid_argument("BeamformerConfig: window_s must be >= 0");
  if (n_candidates < 1) throw std::invalid_argument("BeamformerConfig: n_candidates must be >= 1");
  if (noise_threshold_factor < 0.0) {
    throw std::invalid_argument("BeamformerConfig: noise_threshold_factor must be >= 0");
  }
  if (viterbi_transition_weight < 0.0) {
    throw std::invalid_argument("BeamformerConfig: viterbi_transition_weight must be >= 0");
  }
  if (weight_adapt_rate <= 0.0 || weight_adapt_rate > 1.0) {
    throw std::invalid_argument("BeamformerConfig: weight_adapt_rate must be in (0, 1]");
  }
}

Eigen::ArrayXd adapt_channel_weights(const Eigen::Ref<const Eigen::ArrayXd> &prev,
                                     const Eigen::Ref<const Eigen::ArrayXd> &frame_xcorr,
                                     double adapt_rate, double elim_threshold) {
  if (prev.size() != frame_xcorr.size()) {
    throw std::invalid_argument("adapt_channel_weights: size mismatch");
  }
  if (adapt_rate <= 0.0 || adapt_rate > 1.0) {
    throw std::invalid_argument("adapt_channel_weights: adapt_rate must be in (0, 1]");
  }
  if ((frame_xcorr.abs() > 1.0 + 1e-6).any()) {
    throw std::invalid_argument("adapt_channel_weights: xcorr values must lie in [-1, 1]");
  }
  const Eigen::ArrayXd xcorr = frame_xcorr.min(1.0).max(-1.0);
  Eigen::ArrayXd weights =
      (1.0 - adapt_rate) * prev + adapt_rate * xcorr.max(0.0);
  weights = (xcorr >= elim_threshold).select(weights, 0.0);
  const double total = weights.sum();
  if (total <= 0.0) {
    return Eigen::ArrayXd::Constant(prev.size(), 1.0 / static_cast<double>(prev.size()));
  }
  return weights / total;
}

DelayTrack aoi_to_delay_track(const AoiTrack &track, const ArrayGeometry &geom,
                              const Eigen::Ref<const Eigen::ArrayXd> &frame_times_s) {
  if (track.empty()) throw std::domain_error("aoi_to_delay_track: empty track");
  track.validate();
  DelayTrack delays;
  delays.delay_samples =
      Eigen::ArrayXXi::Zero(frame_times_s.size(), geom.num_channels());
  for (Eigen::Index f = 0; f < frame_times_s.size(); ++f) {
    const double aoi = std::clamp(track.value_at(frame_times_s[f]), -90.0, 90.0);
    const DelayVector dv = delays_from_aoi(geom, aoi);
    for (int ch = 0; ch < geom.num_channels(); ++ch) {
      delays.delay_samples(f, ch) = static_cast<int>(std::lround(dv.samples[ch]));
    }
  }
  return delays;
}

Eigen::ArrayXd beamform_sum(const MultichannelSignal &mc, const DelayTrack &delays,
                            const Eigen::Ref<const Eigen::ArrayXXd> &weights,
                            Eigen::Index window_samples) {
  mc.validate();
  if (window_samples < 2 || window_samples % 2 != 0) {
    throw std::invalid_argument("beamform_sum: window_samples must be even and >= 2");
  }
  const Eigen::Index n = mc.num_samples();
  const int num_ch = mc.num_channels();
  const Eigen::Index hop = window_samples / 2;
  const Eigen::Index num_frames = frame_count(n, hop);
  if (delays.delay_samples.rows() != num_frames ||
      delays.delay_samples.cols() != num_ch || weights.rows() != num_frames ||
      weights.cols() != num_ch) {
    throw std::invalid_argument("beamform_sum: frame grid mismatch");
  }

  // Triangular window: adjacent hops sum to exactly 1.
  Eigen::ArrayXd window(window_samples);
  for (Eigen::Index j = 0; j < window_samples; ++j) {
    window[j] = 1.0 - std::abs(static_cast<double>(j) + 0.5 - hop) / static_cast<double>(hop);
  }

  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd coverage = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index f = 0; f < num_frames; ++f) {
    const Eigen::Index start = f * hop;
    const Eigen::Index len = std::min(window_samples, n - start);
    Eigen::ArrayXd frame = Eigen::ArrayXd::Zero(len);
    for (int ch = 0; ch < num_ch; ++ch) {
      const double w = weights(f, ch);
      if (w == 0.0) continue;
      frame += w * aligned_frame(mc.samples, ch, start, len, delays.delay_samples(f, ch));
    }
    out.segment(start, len) += window.head(len) * frame;
    coverage.segment(start, len) += window.head(len);
  }
  return (coverage > 1e-12).select(out / coverage, 0.0);
}

PipelineResult run_pipeline(const MultichannelSignal &mc, const BeamformerConfig &cfg,
                            const ArrayGeometry &geom,
                            const std::optional<AoiTrack> &aoi) {
  mc.validate();
  cfg.validate();
  geom.validate();
  if (geom.num_channels() != mc.num_channels()) {
    throw std::invalid_argument("run_pipeline: geometry channel count does not match input");
  }
  if (std::abs(geom.sample_rate_hz - mc.sample_rate_hz) > 1e-6) {
    throw std::invalid_argument("run_pipeline: geometry and input sample rates differ");
  }
  const bool needs_aoi = cfg.mode != BeamformMode::kWds;
  if (needs_aoi && !aoi.has_value()) {
    throw std::invalid_argument("run_pipeline: mode " + to_string(cfg.mode) +
                                " requires an AOI track");
  }
  if (!needs_aoi && aoi.has_value()) {
    throw std::invalid_argument("run_pipeline: mode wds does not accept an AOI track");
  }

  const double fs = mc.sample_rate_hz;
  const Eigen::Index n = mc.num_samples();
  const int num_ch = mc.num_channels();
  Eigen::Index win =
      static_cast<Eigen::Index>(std::llround(cfg.resolved_window_s() * fs));
  win = std::max<Eigen::Index>(2, 2 * (win / 2));
  const Eigen::Index hop = win / 2;
  const Eigen::Index num_frames = frame_count(n, hop);
  const int max_lag = geom.max_lag_samples();

  PipelineResult result;
  PipelineDiagnostics &diag = result.diagnostics;
  diag.config = cfg;
  diag.frame_times_s.resize(num_frames);
  for (Eigen::Index f = 0; f < num_frames; ++f) {
    diag.frame_times_s[f] = static_cast<double>(f * hop) / fs;
  }

  // Stage 1: per-channel noise suppression.
  auto t0 = std::chrono::steady_clock::now();
  MultichannelSignal work = mc;
  const bool wiener_active = cfg.wiener_enabled && cfg.mode != BeamformMode::kDsAoi;
  if (wiener_active) {
    for (int ch = 0; ch < num_ch; ++ch) {
      work.samples.col(ch) = wiener_prefilter(work.samples.col(ch), fs);
    }
  } else {
    diag.notes.push_back("wiener prefilter skipped");
  }
  diag.stage_seconds.emplace_back("wiener", elapsed_s(t0));

  // Stage 2: reference channel.
  t0 = std::chrono::steady_clock::now();
  if (cfg.mode == BeamformMode::kWds && num_ch >= 2) {
    diag.reference_channel = select_reference(work, cfg.resolved_window_s(), max_lag);
  } else {
    diag.reference_channel = geom.reference_index;
  }
  diag.stage_seconds.emplace_back("reference", elapsed_s(t0));

  // Stage 3: steering delays.
  t0 = std::chrono::steady_clock::now();
  if (cfg.mode == BeamformMode::kWds) {
    TdoaCandidateSet cands;
    cands.reference_channel = diag.reference_channel;
    cands.num_channels = num_ch;
    cands.frames.resize(static_cast<size_t>(num_frames));
    for (Eigen::Index f = 0; f < num_frames; ++f) {
      const Eigen::Index start = f * hop;
      const Eigen::Index len = std::min(win, n - start);
      auto &frame_entry = cands.frames[static_cast<size_t>(f)];
      frame_entry.resize(static_cast<size_t>(num_ch));
      const Eigen::ArrayXd ref_frame =
          work.samples.col(diag.reference_channel).segment(start, len);
      for (int ch = 0; ch < num_ch; ++ch) {
        if (ch == diag.reference_channel) continue;
        frame_entry[static_cast<size_t>(ch)] = gcc_phat_candidates(
            ref_frame, work.samples.col(ch).segment(start, len), cfg.n_candidates, max_lag);
      }
    }
    diag.delays = viterbi_delay_selection(cands, cfg.viterbi_transition_weight,
                                          cfg.noise_threshold_factor, max_lag);
    if (diag.delays.from_empty_candidates) {
      diag.notes.push_back("no GCC candidates in any frame; steering held at zero");
    }
  } else {
    diag.delays = aoi_to_delay_track(*aoi, geom, diag.frame_times_s);
  }
  diag.stage_seconds.emplace_back("delays", elapsed_s(t0));

  // Stage 4: adaptive channel weights (uniform in ds-aoi and for frame 0).
  t0 = std::chrono::steady_clock::now();
  diag.weights = Eigen::ArrayXXd::Constant(num_frames, num_ch,
                                           1.0 / static_cast<double>(num_ch));
  if (cfg.mode != BeamformMode::kDsAoi && num_ch >= 2) {
    const double elim = cfg.resolved_elim_threshold(num_ch);
    for (Eigen::Index f = 1; f < num_frames; ++f) {
      const Eigen::Index start = f * hop;
      const Eigen::Index len = std::min(win, n - start);
      std::vector<Eigen::ArrayXd> aligned(static_cast<size_t>(num_ch));
      Eigen::ArrayXd norms(num_ch);
      for (int ch = 0; ch < num_ch; ++ch) {
        aligned[static_cast<size_t>(ch)] =
            aligned_frame(work.samples, ch, start, len, diag.delays.delay_samples(f, ch));
        norms[ch] = std::sqrt(aligned[static_cast<size_t>(ch)].square().sum());
      }
      Eigen::ArrayXd xcorr = Eigen::ArrayXd::Zero(num_ch);
      for (int i = 0; i < num_ch; ++i) {
        double acc = 0.0;
        for (int j = 0; j < num_ch; ++j) {
          if (i == j) continue;
          if (norms[i] > 1e-12 && norms[j] > 1e-12) {
            acc += (aligned[static_cast<size_t>(i)] * aligned[static_cast<size_t>(j)]).sum() /
                   (norms[i] * norms[j]);
          }
        }
        xcorr[i] = acc / static_cast<double>(num_ch - 1);
      }
      diag.weights.row(f) =
          adapt_channel_weights(diag.weights.row(f - 1), xcorr, cfg.weight_adapt_rate, elim);
    }
  }
  for (int ch = 0; ch < num_ch; ++ch) {
    if ((diag.weights.col(ch) == 0.0).any()) diag.eliminated_channels.push_back(ch);
  }
  diag.stage_seconds.emplace_back("weights", elapsed_s(t0));

  // Stage 5: weighted summation and output normalization.
  t0 = std::chrono::steady_clock::now();
  Eigen::ArrayXd mono = beamform_sum(work, diag.delays, diag.weights, win);
  const double peak = mono.abs().maxCoeff();
  if (peak > 0.0) {
    mono *= std::pow(10.0, kOutputPeakDbfs / 20.0) / peak;
  }
  diag.stage_seconds.emplace_back("sum", elapsed_s(t0));

  result.output.sample_rate_hz = fs;
  result.output.samples = mono;
  return result;
}

}  // namespace beamsteer
