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

#include "beamsteer/scene.hpp"
#include "beamsteer/signal.hpp"
#include "beamsteer/synth.hpp"
#include "beamsteer/wiener.hpp"
#include "oracles.hpp"

using namespace beamsteer;

TEST_SUITE("wiener") {

TEST_CASE("all-zero input is returned unchanged") {
  const Eigen::ArrayXd zeros = Eigen::ArrayXd::Zero(4096);
  const Eigen::ArrayXd out = wiener_prefilter(zeros, 16000.0);
  REQUIRE(out.size() == 4096);
  CHECK(out.abs().maxCoeff() == 0.0);
}

TEST_CASE("output length always equals input length") {
  Rng rng(17);
  for (Eigen::Index n : {Eigen::Index(512), Eigen::Index(1000), Eigen::Index(7777)}) {
    const Eigen::ArrayXd x = white_noise(n, rng);
    CHECK(wiener_prefilter(x, 16000.0).size() == n);
  }
}

TEST_CASE("input shorter than one frame is rejected") {
  const Eigen::ArrayXd x = Eigen::ArrayXd::Ones(100);
  CHECK_THROWS_AS(wiener_prefilter(x, 16000.0), std::domain_error);
}

TEST_CASE("strong tone passes through while the silent tail is suppressed") {
  // The noise floor is estimated from the quietest decile of frames, so the
  // gap pins it to the true noise and the tone bins see a huge prior SNR.
  const double fs = 16000.0;
  Rng rng(100);
  Rng noise_rng = rng.fork(2);
  const Eigen::Index n = Eigen::Index(fs) * 4;
  const Eigen::Index tone_end = Eigen::Index(fs) * 16 / 5;  // 3.2 s
  Eigen::ArrayXd s = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index i = 0; i < tone_end; ++i) {
    s[i] = std::sin(2.0 * kPi * 440.0 * double(i) / fs);
  }
  const Eigen::ArrayXd noise = white_noise(n, noise_rng);
  const Eigen::ArrayXd noisy = mix_at_snr(s, noise, 50.0);
  const Eigen::ArrayXd out = wiener_prefilter(noisy, fs);

  const Eigen::Index a = Eigen::Index(0.1 * fs);
  const Eigen::Index len = Eigen::Index(3.0 * fs);
  const double tone_delta_db =
      20.0 * std::log10(rms(out.segment(a, len)) / rms(noisy.segment(a, len)));
  CHECK(std::abs(tone_delta_db) < 0.5);

  const Eigen::Index g = Eigen::Index(3.3 * fs);
  const Eigen::Index glen = Eigen::Index(0.6 * fs);
  CHECK(rms(out.segment(g, glen)) < 0.5 * rms(noisy.segment(g, glen)));
}

TEST_CASE("0 dB white noise fixture gains at least 2 dB segmental SNR") {
  const double fs = 16000.0;
  Rng rng(200);
  Rng speech_rng = rng.fork(1);
  Rng noise_rng = rng.fork(2);
  const Eigen::Index n = Eigen::Index(fs) * 4;
  const Eigen::ArrayXd speech = speech_like(n, fs, speech_rng);
  const Eigen::ArrayXd noise = white_noise(n, noise_rng);
  const Eigen::ArrayXd noisy = mix_at_snr(speech, noise, 0.0);
  const Eigen::ArrayXd out = wiener_prefilter(noisy, fs);
  const double before = oracle::segmental_snr_db(speech, noisy, fs);
  const double after = oracle::segmental_snr_db(speech, out, fs);
  CHECK(after - before >= 2.0);
}

TEST_CASE("filter is deterministic") {
  Rng rng(7);
  const Eigen::ArrayXd x = white_noise(8000, rng);
  const Eigen::ArrayXd a = wiener_prefilter(x, 16000.0);
  const Eigen::ArrayXd b = wiener_prefilter(x, 16000.0);
  CHECK((a == b).all());
}

}  // TEST_SUITE
