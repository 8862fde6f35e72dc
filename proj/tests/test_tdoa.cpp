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

#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "beamsteer/signal.hpp"
#include "beamsteer/synth.hpp"
#include "beamsteer/tdoa.hpp"
#include "oracles.hpp"

using namespace beamsteer;

namespace {

// frame_n lagging frame_ref by `lag` samples, cut from one long stream.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> lagged_frames(Rng &rng, Eigen::Index len,
                                                        int lag) {
  const Eigen::ArrayXd s = white_noise(len + 200, rng);
  const Eigen::ArrayXd ref = s.segment(100 + lag, len);
  const Eigen::ArrayXd probe = s.segment(100, len);
  return {ref, probe};
}

}  // namespace

TEST_SUITE("tdoa") {

TEST_CASE("identical frames peak at lag zero with score near one") {
  Rng rng(1);
  const Eigen::ArrayXd frame = white_noise(512, rng);
  const auto cands = gcc_phat_candidates(frame, frame, 4, 16);
  REQUIRE(!cands.empty());
  CHECK(cands[0].lag_samples == 0);
  CHECK(cands[0].score == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("a five-sample lag is recovered") {
  Rng rng(2);
  const auto [ref, probe] = lagged_frames(rng, 512, 5);
  const auto cands = gcc_phat_candidates(ref, probe, 4, 16);
  REQUIRE(!cands.empty());
  CHECK(cands[0].lag_samples == 5);
}

TEST_CASE("four candidates come back on a speech fixture") {
  Rng rng(3);
  const Eigen::ArrayXd speech = speech_like(8000, 16000.0, rng);
  const Eigen::ArrayXd ref = speech.segment(2000, 800);
  const Eigen::ArrayXd probe = speech.segment(1995, 800);
  const auto cands = gcc_phat_candidates(ref, probe, 4, 15);
  CHECK(cands.size() == 4);
  for (size_t i = 1; i < cands.size(); ++i) {
    CHECK(cands[i].score <= cands[i - 1].score);
  }
}

TEST_CASE("zero-energy frames give an empty candidate set") {
  const Eigen::ArrayXd zeros = Eigen::ArrayXd::Zero(256);
  Rng rng(4);
  const Eigen::ArrayXd frame = white_noise(256, rng);
  CHECK(gcc_phat_candidates(zeros, frame, 4, 8).empty());
  CHECK(gcc_phat_candidates(frame, zeros, 4, 8).empty());
}

TEST_CASE("scores stay within the correlation range") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::ArrayXd a = white_noise(300, rng);
    const Eigen::ArrayXd b = white_noise(300, rng);
    for (const auto &c : gcc_phat_candidates(a, b, 4, 12)) {
      CHECK(c.score <= 1.0 + 1e-6);
      CHECK(c.score >= -1.0 - 1e-6);
    }
  }
}

TEST_CASE("gcc top lag equals the brute-force cross-correlation argmax") {
  Rng rng(6);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int lag = static_cast<int>(std::floor(rng.uniform() * 31.0)) - 15;
    auto [ref, probe] = lagged_frames(rng, 600, lag);
    const auto cands = gcc_phat_candidates(ref, probe, 1, 20);
    REQUIRE(!cands.empty());
    const int oracle_lag = oracle::xcorr_best_lag(ref, probe, 20);
    CHECK(cands[0].lag_samples == oracle_lag);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("select_reference prefers the lowest index on ties") {
  Rng rng(7);
  const Eigen::ArrayXd base = white_noise(8000, rng);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(8000, 3);
  for (int ch = 0; ch < 3; ++ch) mc.samples.col(ch) = base;
  CHECK(select_reference(mc, 0.1, 16) == 0);
}

TEST_CASE("select_reference avoids the incoherent channel") {
  Rng rng(8);
  const Eigen::ArrayXd base = white_noise(8200, rng);
  MultichannelSignal mc;
  mc.sample_rate_hz = 16000.0;
  mc.samples = Eigen::ArrayXXd(8000, 4);
  mc.samples.col(0) = base.segment(0, 8000);
  mc.samples.col(1) = base.segment(2, 8000);
  mc.samples.col(2) = base.segment(4, 8000);
  mc.samples.col(3) = white_noise(8000, rng);
  const int ref = select_reference(mc, 0.1, 16);
  CHECK(ref < 3);

  // Attenuating a coherent channel must not change the selection.
  MultichannelSignal scaled = mc;
  scaled.samples.col(1) *= 0.5;
  CHECK(select_reference(scaled, 0.1, 16) == ref);
}

TEST_CASE("constant candidates give a constant track") {
  std::vector<std::vector<TdoaCandidate>> frames(12, {TdoaCandidate{5, 0.9}});
  const auto track = viterbi_select_channel(frames, 1.0, 0.3, 50);
  REQUIRE(track.size() == 12);
  for (int lag : track) CHECK(lag == 5);
}

TEST_CASE("a single spurious high-score candidate does not pull the track") {
  std::vector<std::vector<TdoaCandidate>> frames(10, {TdoaCandidate{5, 0.5}});
  frames[4] = {TdoaCandidate{40, 0.6}, TdoaCandidate{5, 0.5}};
  const auto track = viterbi_select_channel(frames, 1.0, 0.3, 50);
  REQUIRE(track.size() == 10);
  for (int lag : track) CHECK(lag == 5);
  // The per-frame argmax takes the bait; Viterbi must not.
  const auto greedy = argmax_select_channel(frames);
  CHECK(greedy[4] == 40);
}

TEST_CASE("below-threshold frames hold the previous delay") {
  std::vector<std::vector<TdoaCandidate>> frames;
  frames.push_back({TdoaCandidate{5, 0.9}});
  frames.push_back({TdoaCandidate{5, 0.9}});
  frames.push_back({TdoaCandidate{-30, 0.1}});
  const auto track = viterbi_select_channel(frames, 1.0, 0.5, 50);
  REQUIRE(track.size() == 3);
  CHECK(track[2] == 5);
}

TEST_CASE("empty frames hold the previous delay, initially zero") {
  std::vector<std::vector<TdoaCandidate>> frames;
  frames.push_back({});
  frames.push_back({TdoaCandidate{7, 0.8}});
  frames.push_back({});
  const auto track = viterbi_select_channel(frames, 1.0, 0.3, 50);
  CHECK(track[0] == 0);
  CHECK(track[1] == 7);
  CHECK(track[2] == 7);
}

TEST_CASE("all-empty candidate sets raise the diagnostic flag") {
  TdoaCandidateSet cands;
  cands.reference_channel = 0;
  cands.num_channels = 2;
  cands.frames.assign(5, std::vector<std::vector<TdoaCandidate>>(2));
  const DelayTrack track = viterbi_delay_selection(cands, 1.0, 0.3, 16);
  CHECK(track.from_empty_candidates);
  CHECK((track.delay_samples == 0).all());
}

TEST_CASE("viterbi matches exhaustive enumeration on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int num_frames = 1 + static_cast<int>(rng.uniform() * 6.0);
    std::vector<std::vector<TdoaCandidate>> frames(static_cast<size_t>(num_frames));
    for (auto &frame : frames) {
      const int n_cands = static_cast<int>(rng.uniform() * 4.0);  // 0..3
      for (int c = 0; c < n_cands; ++c) {
        TdoaCandidate cand;
        cand.lag_samples = static_cast<int>(std::floor(rng.uniform() * 33.0)) - 16;
        cand.score = rng.uniform();
        frame.push_back(cand);
      }
      // Candidate lists arrive sorted by descending score, as produced by
      // gcc_phat_candidates.
      std::sort(frame.begin(), frame.end(),
                [](const TdoaCandidate &a, const TdoaCandidate &b) {
                  return a.score > b.score;
                });
    }
    const auto fast = viterbi_select_channel(frames, 1.0, 0.3, 16);
    const auto slow = oracle::exhaustive_viterbi(frames, 1.0, 0.3, 16);
    REQUIRE(fast.size() == slow.size());
    for (size_t f = 0; f < fast.size(); ++f) CHECK(fast[f] == slow[f]);
  }
}

}  // TEST_SUITE
