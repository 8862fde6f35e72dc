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

#include "beamsteer/dsp.hpp"
#include "beamsteer/geometry.hpp"
#include "beamsteer/signal.hpp"
#include "beamsteer/synth.hpp"
#include "oracles.hpp"

using namespace beamsteer;

TEST_SUITE("dsp") {

TEST_CASE("next_pow2") {
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(2) == 2);
  CHECK(next_pow2(3) == 4);
  CHECK(next_pow2(512) == 512);
  CHECK(next_pow2(513) == 1024);
}

TEST_CASE("fft round trip") {
  Rng rng(11);
  const Eigen::ArrayXd x = white_noise(300, rng);
  const Eigen::ArrayXcd spec = fft_forward(x, 512);
  const Eigen::ArrayXd back = ifft_real(spec);
  CHECK((back.head(300) - x).abs().maxCoeff() < 1e-12);
  CHECK(back.tail(212).abs().maxCoeff() < 1e-12);
}

TEST_CASE("fractional delay of zero is identity within ripple") {
  Rng rng(5);
  const Eigen::ArrayXd x = white_noise(2000, rng);
  const Eigen::ArrayXd y = fractional_delay(x, 0.0);
  CHECK(rms(y - x) < 1e-3 * rms(x));
}

TEST_CASE("integer delay moves an impulse exactly") {
  Eigen::ArrayXd x = Eigen::ArrayXd::Zero(64);
  x[20] = 1.0;
  const Eigen::ArrayXd y = fractional_delay(x, 3.0);
  CHECK(y[23] >= 0.999);
  double off_peak = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (k != 23) off_peak = std::max(off_peak, std::abs(y[k]));
  }
  CHECK(off_peak < 1e-9);
}

TEST_CASE("tau 2.5 on a 1 kHz tone lands between samples") {
  const double fs = 16000.0;
  const Eigen::Index n = 4096;
  Eigen::ArrayXd x(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x[k] = std::sin(2.0 * kPi * 1000.0 * k / fs);
  }
  const Eigen::ArrayXd y = fractional_delay(x, 2.5);
  // Trim edges so the kernel support is fully inside the signal.
  const Eigen::ArrayXd ref = x.segment(64, n - 512);
  const Eigen::ArrayXd probe = y.segment(64, n - 512);
  const double lag = oracle::xcorr_best_lag_parabolic(ref, probe, 8);
  CHECK(lag == doctest::Approx(2.5).epsilon(0.02));
}

TEST_CASE("energy preserved for band-limited input") {
  const double fs = 16000.0;
  Eigen::ArrayXd x(8000);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x[k] = std::sin(2.0 * kPi * 440.0 * k / fs) + 0.3 * std::sin(2.0 * kPi * 1850.0 * k / fs);
  }
  const Eigen::ArrayXd y = fractional_delay(x, 4.37);
  const double in_db = 20.0 * std::log10(rms(x.segment(100, 7000)));
  const double out_db = 20.0 * std::log10(rms(y.segment(100, 7000)));
  CHECK(std::abs(in_db - out_db) < 0.1);
}

TEST_CASE("fractional delay rejects out-of-range tau") {
  const Eigen::ArrayXd x = Eigen::ArrayXd::Ones(10);
  CHECK_THROWS_AS(fractional_delay(x, 10.5), std::domain_error);
  CHECK_THROWS_AS(fractional_delay(x, -11.0), std::domain_error);
}

TEST_CASE("delayed_block matches fractional_delay on the same range") {
  Rng rng(21);
  const Eigen::ArrayXd x = white_noise(500, rng);
  const Eigen::ArrayXd whole = fractional_delay(x, 1.75);
  const Eigen::ArrayXd block = delayed_block(x, 100, 80, 1.75);
  CHECK((whole.segment(100, 80) - block).abs().maxCoeff() < 1e-12);
}

TEST_CASE("delayed_block reads zeros outside the signal") {
  const Eigen::ArrayXd x = Eigen::ArrayXd::Ones(16);
  const Eigen::ArrayXd y = delayed_block(x, -40, 10, 0.0);
  CHECK(y.abs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
