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

#include "beamsteer/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamsteer/dsp.hpp"
#include "beamsteer/synth.hpp"

namespace beamsteer {
namespace {

constexpr double kHopSeconds = 0.010;
constexpr double kSoftLimitCeiling = 0.99;

struct LegProfile {
  double length_m = 0.0;
  double t_acc_s = 0.0;
  double leg_duration_s = 0.0;
  double accel = 0.0;
  double cruise_v = 0.0;

  double distance_at(double u) const {
    if (u <= t_acc_s) return 0.5 * accel * u * u;
    if (u >= leg_duration_s - t_acc_s) {
      const double r = leg_duration_s - u;
      return length_m - 0.5 * accel * r * r;
    }
    return 0.5 * accel * t_acc_s * t_acc_s + cruise_v * (u - t_acc_s);
  }
};

LegProfile make_leg(const ScenarioConfig &cfg) {
  LegProfile leg;
  leg.length_m = (cfg.p3_m - cfg.p1_m).norm();
  leg.accel = cfg.accel_mps2;
  if (leg.length_m < 1e-12) return leg;
  const double t_acc_full = cfg.v_max_mps / cfg.accel_mps2;
  const double d_acc_full = 0.5 * cfg.accel_mps2 * t_acc_full * t_acc_full;
  if (2.0 * d_acc_full >= leg.length_m) {
    // Never reaches v_max: triangular profile.
    leg.t_acc_s = std::sqrt(leg.length_m / cfg.accel_mps2);
    leg.leg_duration_s = 2.0 * leg.t_acc_s;
    leg.cruise_v = cfg.accel_mps2 * leg.t_acc_s;
  } else {
    leg.t_acc_s = t_acc_full;
    leg.cruise_v = cfg.v_max_mps;
    leg.leg_duration_s = 2.0 * t_acc_full + (leg.length_m - 2.0 * d_acc_full) / cfg.v_max_mps;
  }
  return leg;
}

// Linear interpolation on a dense track; exact at the track's own times.
double track_value_interp(const AoiTrack &track, double t) {
  if (track.empty()) throw std::domain_error("track_value_interp: empty track");
  if (t <= track.time_s[0]) return track.aoi_deg[0];
  const Eigen::Index last = track.size() - 1;
  if (t >= track.time_s[last]) return track.aoi_deg[last];
  Eigen::Index lo = 0, hi = last;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (track.time_s[mid] <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double span = track.time_s[hi] - track.time_s[lo];
  const double alpha = span > 0.0 ? (t - track.time_s[lo]) / span : 0.0;
  return track.aoi_deg[lo] + alpha * (track.aoi_deg[hi] - track.aoi_deg[lo]);
}

Eigen::ArrayXd utterance_gate(Eigen::Index n, double fs, double on_s, double gap_s) {
  Eigen::ArrayXd gate = Eigen::ArrayXd::Zero(n);
  const Eigen::Index on_n = static_cast<Eigen::Index>(std::llround(on_s * fs));
  const Eigen::Index gap_n = static_cast<Eigen::Index>(std::llround(gap_s * fs));
  const Eigen::Index edge = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(0.02 * fs));
  Eigen::Index pos = 0;
  while (pos < n) {
    const Eigen::Index end = std::min(n, pos + on_n);
    for (Eigen::Index i = pos; i < end; ++i) {
      double g = 1.0;
      if (i - pos < edge) g = 0.5 - 0.5 * std::cos(kPi * (i - pos) / static_cast<double>(edge));
      if (end - 1 - i < edge) {
        g = std::min(g, 0.5 - 0.5 * std::cos(kPi * (end - 1 - i) / static_cast<double>(edge)));
      }
      gate[i] = g;
    }
    pos = end + gap_n;
  }
  return gate;
}

// Synthetic diffuse tail: unit direct path plus an exponentially decaying
// noise tail, 60 dB down at rt60.
Eigen::ArrayXd decay_tail_ir(double rt60_s, double fs, Rng &rng) {
  const Eigen::Index len =
      std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::llround(1.2 * rt60_s * fs)));
  Eigen::ArrayXd ir = Eigen::ArrayXd::Zero(len);
  ir[0] = 1.0;
  const double decay = std::log(1000.0) / (rt60_s * fs);
  for (Eigen::Index k = 1; k < len; ++k) {
    ir[k] = 0.3 / std::sqrt(0.05 * rt60_s * fs) * rng.gaussian() * std::exp(-decay * k);
  }
  return ir;
}

Eigen::ArrayXd fft_convolve_same(const Eigen::Ref<const Eigen::ArrayXd> &x,
                                 const Eigen::Ref<const Eigen::ArrayXd> &h) {
  const int nfft = next_pow2(static_cast<int>(x.size() + h.size() - 1));
  const Eigen::ArrayXcd spectrum = fft_forward(x, nfft) * fft_forward(h, nfft);
  return ifft_real(spectrum).head(x.size());
}

}  // namespace

void ScenarioConfig::validate() const {
  geometry.validate();
  if (v_max_mps <= 0.0) throw std::invalid_argument("ScenarioConfig: v_max must be positive");
  if (accel_mps2 <= 0.0) throw std::invalid_argument("ScenarioConfig: accel must be positive");
  if (duration_s <= 0.0) {
    throw std::invalid_argument("ScenarioConfig: duration_s must be positive");
  }
  if (noise_sources.size() > 2) {
    throw std::invalid_argument("ScenarioConfig: at most 2 noise sources supported");
  }
  const Eigen::Vector2d midpoint = 0.5 * (p1_m + p3_m);
  if ((p2_m - midpoint).norm() > 1e-9) {
    throw std::invalid_argument("ScenarioConfig: p2 must be the midpoint of p1 and p3");
  }
  if (speech_source.audio.empty()) {
    throw std::invalid_argument("ScenarioConfig: speech source audio reference is empty");
  }
  for (const auto &ns : noise_sources) {
    if (ns.audio.empty()) {
      throw std::invalid_argument("ScenarioConfig: noise source audio reference is empty");
    }
    if (!std::isfinite(ns.snr_db)) {
      throw std::invalid_argument("ScenarioConfig: noise snr_db must be finite");
    }
  }
  if (rt60_s < 0.0) throw std::invalid_argument("ScenarioConfig: rt60_s must be >= 0");
  if (utterance_gap_s < 0.0 || utterance_len_s <= 0.0) {
    throw std::invalid_argument("ScenarioConfig: utterance pacing fields must be positive");
  }
  servo.validate();
}

double base_leg_duration_s(const ScenarioConfig &cfg) {
  return make_leg(cfg).leg_duration_s;
}

Eigen::Vector2d base_pose_at(const ScenarioConfig &cfg, double t_s) {
  if (t_s < 0.0 || t_s > cfg.duration_s + 1e-9) {
    throw std::domain_error("base_pose_at: t outside [0, duration]");
  }
  const LegProfile leg = make_leg(cfg);
  if (leg.length_m < 1e-12) return cfg.p1_m;
  const double period = 2.0 * leg.leg_duration_s;
  double u = std::fmod(t_s, period);
  if (u < 0.0) u += period;
  double s = 0.0;
  if (u <= leg.leg_duration_s) {
    s = leg.distance_at(u);
  } else {
    s = leg.length_m - leg.distance_at(u - leg.leg_duration_s);
  }
  const Eigen::Vector2d direction = (cfg.p3_m - cfg.p1_m) / leg.length_m;
  return cfg.p1_m + direction * s;
}

Eigen::ArrayXd mix_at_snr(const Eigen::Ref<const Eigen::ArrayXd> &clean,
                          const Eigen::Ref<const Eigen::ArrayXd> &noise, double snr_db) {
  if (clean.size() != noise.size()) {
    throw std::invalid_argument("mix_at_snr: sequences must have equal length");
  }
  const double rms_clean = rms(clean);
  const double rms_noise = rms(noise);
  if (rms_clean <= 0.0 || rms_noise <= 0.0) {
    throw std::domain_error("mix_at_snr: both sequences must be non-silent");
  }
  const double gain = rms_clean / rms_noise * std::pow(10.0, -snr_db / 20.0);
  return clean + gain * noise;
}

SceneResult synthesize_scene(const ScenarioConfig &cfg) {
  cfg.validate();
  const ArrayGeometry &geom = cfg.geometry;
  const double fs = geom.sample_rate_hz;
  const int num_ch = geom.num_channels();
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(cfg.duration_s * fs));
  const Eigen::Index hop =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(kHopSeconds * fs)));
  const Eigen::Index win = 2 * hop;

  SceneResult result;

  // Fixed fork order keeps the stream assignment independent of which
  // optional stages are enabled.
  Rng root(cfg.seed);
  Rng speech_rng = root.fork(1);
  std::vector<Rng> noise_rngs;
  for (size_t i = 0; i < cfg.noise_sources.size(); ++i) {
    noise_rngs.push_back(root.fork(2 + static_cast<uint64_t>(i)));
  }
  Rng ego_rng = root.fork(8);
  Rng tail_rng = root.fork(9);

  // Head yaw over time. Servo mode runs the 100 Hz loop; static holds 0.
  AoiTrack yaw_dense;
  if (cfg.head_mode == HeadMode::kServo) {
    yaw_dense = simulate_head(cfg).yaw;
  }
  const auto yaw_at = [&](double t) {
    return cfg.head_mode == HeadMode::kServo ? track_value_interp(yaw_dense, t) : 0.0;
  };

  // Source streams.
  Eigen::ArrayXd speech = resolve_source_audio(cfg.speech_source.audio, n, fs, speech_rng);
  if (cfg.utterance_gap_s > 0.0) {
    speech *= utterance_gate(n, fs, cfg.utterance_len_s, cfg.utterance_gap_s);
  }
  std::vector<Eigen::ArrayXd> noise_streams;
  for (size_t i = 0; i < cfg.noise_sources.size(); ++i) {
    noise_streams.push_back(
        resolve_source_audio(cfg.noise_sources[i].audio, n, fs, noise_rngs[i]));
  }

  // Raised-cosine hop window; adjacent hops sum to exactly 1.
  Eigen::ArrayXd window(win);
  for (Eigen::Index j = 0; j < win; ++j) {
    window[j] = 0.5 - 0.5 * std::cos(2.0 * kPi * (j + 0.5) / static_cast<double>(win));
  }

  const auto render_image = [&](const Eigen::ArrayXd &stream, const Eigen::Vector2d &pos,
                                const std::string &label) {
    Eigen::ArrayXXd image = Eigen::ArrayXXd::Zero(n, num_ch);
    Eigen::ArrayXd coverage = Eigen::ArrayXd::Zero(n);
    Eigen::Index clamped_frames = 0;
    for (Eigen::Index start = 0; start < n; start += hop) {
      const Eigen::Index len = std::min(win, n - start);
      const double t_center = std::min(static_cast<double>(start + hop) / fs, cfg.duration_s);
      const Eigen::Vector2d head_pos = base_pose_at(cfg, t_center);
      const double aoi = aoi_from_pose(yaw_at(t_center), head_pos, pos);
      double aoi_clamped = aoi;
      if (aoi < -90.0 || aoi > 90.0) {
        ++clamped_frames;
        aoi_clamped = std::clamp(aoi, -90.0, 90.0);
      }
      const DelayVector delays = delays_from_aoi(geom, aoi_clamped);
      for (int ch = 0; ch < num_ch; ++ch) {
        // tau is the arrival lag of this channel, so the image is delayed.
        const Eigen::ArrayXd block = delayed_block(stream, start, len, delays.samples[ch]);
        image.col(ch).segment(start, len) += window.head(len) * block;
      }
      coverage.segment(start, len) += window.head(len);
    }
    for (int ch = 0; ch < num_ch; ++ch) {
      image.col(ch) = (coverage > 1e-12).select(image.col(ch) / coverage, 0.0);
    }
    if (clamped_frames > 0) {
      result.warnings.push_back(label + " AOI outside (-90, 90) deg in " +
                                std::to_string(clamped_frames) +
                                " frames; end-fire delay clamp applied");
    }
    return image;
  };

  Eigen::ArrayXXd clean = render_image(speech, cfg.speech_source.position_m, "speech source");

  const int ref = geom.reference_index;
  const double rms_clean_ref = rms(clean.col(ref));

  Eigen::ArrayXXd mixture = clean;
  for (size_t i = 0; i < cfg.noise_sources.size(); ++i) {
    const Eigen::ArrayXXd noise_img = render_image(
        noise_streams[i], cfg.noise_sources[i].position_m, "noise source " + std::to_string(i + 1));
    const double rms_noise_ref = rms(noise_img.col(ref));
    if (rms_clean_ref <= 0.0 || rms_noise_ref <= 0.0) {
      throw std::domain_error("synthesize_scene: SNR mixing needs non-silent speech and noise");
    }
    const double gain =
        rms_clean_ref / rms_noise_ref * std::pow(10.0, -cfg.noise_sources[i].snr_db / 20.0);
    mixture += gain * noise_img;
  }

  if (cfg.ego_noise_enabled) {
    if (rms_clean_ref <= 0.0) {
      throw std::domain_error("synthesize_scene: ego noise needs non-silent speech");
    }
    const double gain = rms_clean_ref * std::pow(10.0, -cfg.ego_noise_snr_db / 20.0);
    for (int ch = 0; ch < num_ch; ++ch) {
      Rng ch_rng = ego_rng.fork(static_cast<uint64_t>(ch) + 1);
      mixture.col(ch) += gain * pink_noise(n, ch_rng);  // already unit RMS
    }
  }

  if (cfg.rt60_s > 0.0) {
    for (int ch = 0; ch < num_ch; ++ch) {
      Rng ch_rng = tail_rng.fork(static_cast<uint64_t>(ch) + 1);
      const Eigen::ArrayXd ir = decay_tail_ir(cfg.rt60_s, fs, ch_rng);
      mixture.col(ch) = fft_convolve_same(mixture.col(ch), ir);
    }
    result.warnings.push_back("decay tail applied to the mixture; clean reference stays anechoic");
  }

  const double peak = mixture.abs().maxCoeff();
  if (peak > kSoftLimitCeiling) {
    result.soft_limited = true;
    result.soft_limit_scale = kSoftLimitCeiling / peak;
    mixture *= result.soft_limit_scale;
    clean *= result.soft_limit_scale;
    result.warnings.push_back("soft limit engaged: scale " +
                              std::to_string(result.soft_limit_scale));
  }

  // Ground truth at the hop rate, unclamped.
  const Eigen::Index num_hops = (n + hop - 1) / hop;
  result.ground_truth_aoi.time_s.resize(num_hops);
  result.ground_truth_aoi.aoi_deg.resize(num_hops);
  result.head_yaw.time_s.resize(num_hops);
  result.head_yaw.aoi_deg.resize(num_hops);
  for (Eigen::Index k = 0; k < num_hops; ++k) {
    const double t = static_cast<double>(k * hop) / fs;
    const double yaw = yaw_at(t);
    result.ground_truth_aoi.time_s[k] = t;
    result.ground_truth_aoi.aoi_deg[k] =
        aoi_from_pose(yaw, base_pose_at(cfg, t), cfg.speech_source.position_m);
    result.head_yaw.time_s[k] = t;
    result.head_yaw.aoi_deg[k] = yaw;
  }

  result.mixture.sample_rate_hz = fs;
  result.mixture.samples = std::move(mixture);
  result.clean_speech.sample_rate_hz = fs;
  result.clean_speech.samples = std::move(clean);
  result.mixture.validate();
  result.ground_truth_aoi.validate();
  return result;
}

}  // namespace beamsteer
