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

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "beamsteer/beamform.hpp"
#include "beamsteer/geometry.hpp"
#include "beamsteer/metrics.hpp"
#include "beamsteer/signal.hpp"
#include "beamsteer/synth.hpp"

using namespace beamsteer;

namespace {

Eigen::ArrayXXd uniform_weights(Eigen::Index frames, int channels) {
  return Eigen::ArrayXXd::Constant(frames, channels, 1.0 / channels);
}

DelayTrack zero_delays(Eigen::Index frames, int channels) {
  DelayTrack track;
  track.delay_samples = Eigen::ArrayXXi::Zero(frames, channels);
  return track;
}

AoiTrack constant_track(double aoi_deg, double duration_s = 10.0) {
  AoiTrack track;
  track.time_s = Eigen::ArrayXd(2);
  track.time_s << 0.0, duration_s;
  track.aoi_deg = Eigen::ArrayXd(2);
  track.aoi_deg << aoi_deg, aoi_deg;
  return track;
}

}  // namespace

TEST_SUITE("beamform") {

TEST_CASE("mode names round trip") {
  for (auto mode : {BeamformMode::kWds, BeamformMode::kWdsAoi, BeamformMode::kDsAoi}) {
    CHECK(beamform_mode_from_string(to_string(mode)) == mode);
  }
  CHECK_THROWS_AS(beamform_mode_from_string("mvdr"), std::invalid_argument);
}

TEST_CASE("window defaults per mode") {
  BeamformerConfig cfg;
  cfg.mode = BeamformMode::kWds;
  CHECK(cfg.resolved_window_s() == 0.5);
  cfg.mode = BeamformMode::kWdsAoi;
  CHECK(cfg.resolved_window_s() == 0.5);
  cfg.mode = BeamformMode::kDsAoi;
  CHECK(cfg.resolved_window_s() == 0.05);
  cfg.window_s = 0.2;
  CHECK(cfg.resolved_window_s() == 0.2);
}

TEST_CASE("weight adaptation hand example") {
  const Eigen::ArrayXd prev = Eigen::ArrayXd::Constant(4, 0.25);
  Eigen::ArrayXd xcorr(4);
  xcorr << 0.9, 0.9, 0.9, 0.3;
  const Eigen::ArrayXd w = adapt_channel_weights(prev, xcorr, 0.05, 1.0 / 12.0);
  // Pre-normalization values are (0.2825, 0.2825, 0.2825, 0.2525); the sum
  // is 1.1, so the normalized weights follow.
  CHECK(w[0] == doctest::Approx(0.2825 / 1.1).epsilon(1e-5));
  CHECK(w[1] == doctest::Approx(0.2825 / 1.1).epsilon(1e-5));
  CHECK(w[2] == doctest::Approx(0.2825 / 1.1).epsilon(1e-5));
  CHECK(w[3] == doctest::Approx(0.2525 / 1.1).epsilon(1e-5));
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("low-correlation channels are eliminated and the rest renormalize") {
  const Eigen::ArrayXd prev = Eigen::ArrayXd::Constant(4, 0.25);
  Eigen::ArrayXd xcorr(4);
  xcorr << 0.8, 0.8, 0.8, 0.01;
  const Eigen::ArrayXd w = adapt_channel_weights(prev, xcorr, 0.05, 0.1);
  CHECK(w[3] == 0.0);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("negative correlations clamp to zero mass") {
  Eigen::ArrayXd prev(2);
  prev << 0.5, 0.5;
  Eigen::ArrayXd xcorr(2);
  xcorr << -0.5, 0.8;
  const Eigen::ArrayXd w = adapt_channel_weights(prev, xcorr, 0.1, 0.05);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fully eliminated frame falls back to uniform") {
  Eigen::ArrayXd prev(3);
  prev << 0.4, 0.3, 0.3;
  Eigen::ArrayXd xcorr(3);
  xcorr << 0.01, 0.02, 0.0;
  const Eigen::ArrayXd w = adapt_channel_weights(prev, xcorr, 0.05, 0.5);
  for (int n = 0; n < 3; ++n) CHECK(w[n] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("correlations outside the valid range are rejected") {
  const Eigen::ArrayXd prev = Eigen::ArrayXd::Constant(2, 0.5);
  Eigen::ArrayXd xcorr(2);
  xcorr << 1.5, 0.2;
  CHECK_THROWS_AS(adapt_channel_weights(prev, xcorr, 0.05, 0.1), std::invalid_argument);
}

TEST_CASE("aoi_to_delay_track basics") {
  ArrayGeometry g;
  g.mic_offsets_m = Eigen::ArrayXd(2);
  g.mic_offsets_m << 0.0, 0.1;
  g.sound_speed_mps = 343.0;
  g.sample_rate_hz = 16000.0;

  const Eigen::ArrayXd frame_times = Eigen::ArrayXd::LinSpaced(5, 0.0, 1.0);
  const DelayTrack zero = aoi_to_delay_track(constant_track(0.0), g, frame_times);
  CHECK((zero.delay_samples == 0).all());

  const DelayTrack thirty = aoi_to_delay_track(constant_track(30.0), g, frame_times);
  for (Eigen::Index f = 0; f < thirty.delay_samples.rows(); ++f) {
    CHECK(thirty.delay_samples(f, 1) == 2);  // round(2.3324)
  }
}

TEST_CASE("aoi step lands on the first frame at or after the step time") {
  ArrayGeometry g;
  g.mic_offsets_m = Eigen::ArrayXd(2);
  g.mic_offsets_m << 0.0, 0.1;
  g.sound_speed_mps = 343.0;
  g.sample_rate_hz = 16000.0;

  AoiTrack track;
  track.time_s = Eigen::ArrayXd(2);
  track.time_s << 0.0, 0.25;
  track.aoi_deg = Eigen::ArrayXd(2);
  track.aoi_deg << 0.0, 30.0;

  Eigen::ArrayXd frame_times(4);
  frame_times << 0.0, 0.1, 0.25, 0.4;
  const DelayTrack d = aoi_to_delay_track(track, g, frame_times);
  CHECK(d.delay_samples(0, 1) == 0);
  CHECK(d.delay_samples(1, 1) == 0);
  CHECK(d.delay_samples(2, 1) == 2);
  CHECK(d.delay_samples(3, 1) == 2);
}

TEST_CASE("beamform_sum single-channel identity") {
  Rng rng(1);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(4000, 1);
  mc.samples.col(0) = white_noise(4000, rng);
  const Eigen::Index frames = 4000 / 400;  // window 800, hop 400
  const Eigen::ArrayXd y =
      beamform_sum(mc, zero_delays(frames, 1), uniform_weights(frames, 1) * 1.0, 800);
  CHECK((y - mc.samples.col(0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("beamform_sum convexity on identical channels") {
  Rng rng(2);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(4000, 2);
  mc.samples.col(0) = white_noise(4000, rng);
  mc.samples.col(1) = mc.samples.col(0);
  const Eigen::Index frames = 10;
  const Eigen::ArrayXd y =
      beamform_sum(mc, zero_delays(frames, 2), uniform_weights(frames, 2), 800);
  CHECK((y - mc.samples.col(0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("beamform_sum realigns a delayed copy") {
  Rng rng(3);
  const Eigen::ArrayXd s = white_noise(4100, rng);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(4000, 2);
  mc.samples.col(0) = s.segment(50, 4000);
  mc.samples.col(1) = s.segment(43, 4000);  // channel 1 lags by 7 samples
  DelayTrack delays;
  delays.delay_samples = Eigen::ArrayXXi(10, 2);
  delays.delay_samples.col(0).setZero();
  delays.delay_samples.col(1).setConstant(7);
  const Eigen::ArrayXd y = beamform_sum(mc, delays, uniform_weights(10, 2), 800);
  const Eigen::ArrayXd diff = (y - mc.samples.col(0)).segment(7, 4000 - 14);
  CHECK(diff.abs().maxCoeff() < 1e-12);
}

TEST_CASE("common weight scaling cancels under normalization") {
  Rng rng(4);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(2000, 3);
  for (int ch = 0; ch < 3; ++ch) mc.samples.col(ch) = white_noise(2000, rng);
  Eigen::ArrayXXd raw = Eigen::ArrayXXd::Random(5, 3).abs() + 0.1;
  Eigen::ArrayXXd normalized = raw;
  for (Eigen::Index f = 0; f < raw.rows(); ++f) normalized.row(f) /= raw.row(f).sum();
  Eigen::ArrayXXd scaled = raw * 3.7;
  for (Eigen::Index f = 0; f < scaled.rows(); ++f) scaled.row(f) /= scaled.row(f).sum();
  const Eigen::ArrayXd a = beamform_sum(mc, zero_delays(5, 3), normalized, 800);
  const Eigen::ArrayXd b = beamform_sum(mc, zero_delays(5, 3), scaled, 800);
  CHECK((a - b).abs().maxCoeff() < 1e-12);
}

TEST_CASE("ds-aoi pipeline on an exactly aligned source") {
  // Offsets chosen so the end-fire lags are integral: 16 and 32 samples.
  ArrayGeometry g;
  g.mic_offsets_m = Eigen::ArrayXd(3);
  g.mic_offsets_m << 0.0, 0.343, 0.686;
  g.sound_speed_mps = 343.0;
  g.sample_rate_hz = 16000.0;

  Rng rng(5);
  const Eigen::Index n = 48000;
  const Eigen::ArrayXd s = white_noise(n + 64, rng);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(n, 3);
  mc.samples.col(0) = s.segment(64, n);
  mc.samples.col(1) = s.segment(48, n);
  mc.samples.col(2) = s.segment(32, n);

  BeamformerConfig cfg;
  cfg.mode = BeamformMode::kDsAoi;
  const PipelineResult result = run_pipeline(mc, cfg, g, constant_track(90.0, 3.0));

  CHECK(result.diagnostics.reference_channel == 0);
  const Eigen::ArrayXd out = result.output.samples.col(0).segment(40, n - 80);
  const Eigen::ArrayXd ref = mc.samples.col(0).segment(40, n - 80);
  CHECK(si_sdr(out, ref) == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(peak_abs(result.output.samples.col(0)) ==
        doctest::Approx(std::pow(10.0, -3.0 / 20.0)).epsilon(1e-9));
}

TEST_CASE("ds-aoi runs without the prefilter and with uniform weights") {
  Rng rng(6);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(16000, 4);
  for (int ch = 0; ch < 4; ++ch) mc.samples.col(ch) = white_noise(16000, rng);
  BeamformerConfig cfg;
  cfg.mode = BeamformMode::kDsAoi;
  const PipelineResult result =
      run_pipeline(mc, cfg, ArrayGeometry::default_array(), constant_track(0.0, 1.0));
  const Eigen::ArrayXXd &w = result.diagnostics.weights;
  CHECK((w - 0.25).abs().maxCoeff() < 1e-12);
  bool saw_wiener_note = false;
  for (const auto &note : result.diagnostics.notes) {
    if (note.find("wiener") != std::string::npos) saw_wiener_note = true;
  }
  CHECK(saw_wiener_note);
}

TEST_CASE("first adaptive frame is uniform") {
  Rng rng(7);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(32000, 4);
  const Eigen::ArrayXd s = white_noise(32000, rng);
  for (int ch = 0; ch < 4; ++ch) {
    mc.samples.col(ch) = s + 0.3 * white_noise(32000, rng);
  }
  BeamformerConfig cfg;
  cfg.mode = BeamformMode::kWds;
  const PipelineResult result = run_pipeline(mc, cfg, ArrayGeometry::default_array());
  CHECK((result.diagnostics.weights.row(0) - 0.25).abs().maxCoeff() < 1e-12);
  for (Eigen::Index f = 0; f < result.diagnostics.weights.rows(); ++f) {
    CHECK(result.diagnostics.weights.row(f).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("mode and AOI mismatches are rejected") {
  Rng rng(8);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(16000, 2);
  mc.samples.col(0) = white_noise(16000, rng);
  mc.samples.col(1) = white_noise(16000, rng);
  ArrayGeometry g;
  g.mic_offsets_m = Eigen::ArrayXd(2);
  g.mic_offsets_m << 0.0, 0.1;
  BeamformerConfig cfg;

  cfg.mode = BeamformMode::kWds;
  CHECK_THROWS_AS(run_pipeline(mc, cfg, g, constant_track(0.0, 1.0)), std::invalid_argument);
  cfg.mode = BeamformMode::kDsAoi;
  CHECK_THROWS_AS(run_pipeline(mc, cfg, g), std::invalid_argument);
  cfg.mode = BeamformMode::kWdsAoi;
  CHECK_THROWS_AS(run_pipeline(mc, cfg, g), std::invalid_argument);
}

TEST_CASE("pipeline output is bit-identical across runs") {
  Rng rng(9);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(24000, 4);
  const Eigen::ArrayXd s = white_noise(24000, rng);
  for (int ch = 0; ch < 4; ++ch) {
    mc.samples.col(ch) = s + 0.5 * white_noise(24000, rng);
  }
  BeamformerConfig cfg;
  cfg.mode = BeamformMode::kWds;
  const ArrayGeometry g = ArrayGeometry::default_array();
  const PipelineResult a = run_pipeline(mc, cfg, g);
  const PipelineResult b = run_pipeline(mc, cfg, g);
  CHECK((a.output.samples == b.output.samples).all());
}

TEST_CASE("config validation rejects bad parameters") {
  BeamformerConfig cfg;
  cfg.n_candidates = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BeamformerConfig{};
  cfg.weight_adapt_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BeamformerConfig{};
  cfg.viterbi_transition_weight = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = BeamformerConfig{};
  cfg.window_s = -0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
