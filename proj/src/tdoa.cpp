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

#include "beamsteer/tdoa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamsteer/dsp.hpp"

namespace beamsteer {
namespace {

// Circular cross-correlation lags via FFT: corr[l] = sum_k ref[k] * other[k + l].
Eigen::ArrayXd cross_correlation_lags(const Eigen::Ref<const Eigen::ArrayXd> &ref,
                                      const Eigen::Ref<const Eigen::ArrayXd> &other,
                                      int max_lag, bool phat) {
  const int nfft = next_pow2(static_cast<int>(2 * ref.size()));
  if (2 * max_lag + 1 > nfft) {
    throw std::invalid_argument("cross_correlation_lags: max_lag too large for frame");
  }
  Eigen::ArrayXcd cross = fft_forward(ref, nfft).conjugate() * fft_forward(other, nfft);
  if (phat) {
    cross /= cross.abs().max(1e-12);
  }
  const Eigen::ArrayXd corr = ifft_real(cross);
  Eigen::ArrayXd lags(2 * max_lag + 1);
  for (int l = -max_lag; l <= max_lag; ++l) {
    lags[l + max_lag] = corr[l >= 0 ? l : nfft + l];
  }
  return lags;
}

double median_sorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

}  // namespace

int select_reference(const MultichannelSignal &mc, double window_s, int max_lag) {
  mc.validate();
  const int num_ch = mc.num_channels();
  if (num_ch < 2) {
    throw std::invalid_argument("select_reference: at least 2 channels required");
  }
  if (window_s <= 0.0 || max_lag < 0) {
    throw std::invalid_argument("select_reference: window_s > 0 and max_lag >= 0 required");
  }
  const Eigen::Index n = mc.num_samples();
  const Eigen::Index win = std::min<Eigen::Index>(
      n, static_cast<Eigen::Index>(std::llround(window_s * mc.sample_rate_hz)));
  if (win < 2) {
    throw std::invalid_argument("select_reference: window shorter than 2 samples");
  }
  const Eigen::Index hop = std::max<Eigen::Index>(1, win / 2);

  Eigen::ArrayXd score_sum = Eigen::ArrayXd::Zero(num_ch);
  Eigen::Index num_windows = 0;
  for (Eigen::Index start = 0; start + win <= n; start += hop) {
    ++num_windows;
    std::vector<Eigen::ArrayXd> frames;
    std::vector<double> norms;
    frames.reserve(static_cast<size_t>(num_ch));
    for (int ch = 0; ch < num_ch; ++ch) {
      frames.push_back(mc.samples.col(ch).segment(start, win));
      norms.push_back(std::sqrt(frames.back().square().sum()));
    }
    for (int i = 0; i < num_ch; ++i) {
      for (int j = i + 1; j < num_ch; ++j) {
        double peak = 0.0;
        if (norms[static_cast<size_t>(i)] > 1e-12 && norms[static_cast<size_t>(j)] > 1e-12) {
          const Eigen::ArrayXd lags =
              cross_correlation_lags(frames[static_cast<size_t>(i)],
                                     frames[static_cast<size_t>(j)], max_lag, false);
          peak = lags.maxCoeff() /
                 (norms[static_cast<size_t>(i)] * norms[static_cast<size_t>(j)]);
        }
        score_sum[i] += peak;
        score_sum[j] += peak;
      }
    }
    if (start + win == n) break;
  }
  if (num_windows == 0) {
    throw std::invalid_argument("select_reference: signal shorter than one window");
  }

  int best = 0;
  for (int ch = 1; ch < num_ch; ++ch) {
    if (score_sum[ch] > score_sum[best]) best = ch;
  }
  return best;
}

std::vector<TdoaCandidate> gcc_phat_candidates(
    const Eigen::Ref<const Eigen::ArrayXd> &frame_ref,
    const Eigen::Ref<const Eigen::ArrayXd> &frame_n, int n_candidates, int max_lag) {
  if (frame_ref.size() != frame_n.size()) {
    throw std::invalid_argument("gcc_phat_candidates: frames must have equal length");
  }
  if (n_candidates < 1 || max_lag < 1) {
    throw std::invalid_argument("gcc_phat_candidates: N >= 1 and max_lag >= 1 required");
  }
  if (frame_ref.size() < 2) {
    throw std::invalid_argument("gcc_phat_candidates: frames too short");
  }
  if ((frame_ref != 0.0).count() == 0 || (frame_n != 0.0).count() == 0) {
    return {};
  }

  const Eigen::ArrayXd corr = cross_correlation_lags(frame_ref, frame_n, max_lag, true);
  const int len = static_cast<int>(corr.size());

  std::vector<TdoaCandidate> peaks;
  for (int i = 0; i < len; ++i) {
    const bool left_ok = (i == 0) || (corr[i] > corr[i - 1]);
    const bool right_ok = (i == len - 1) || (corr[i] >= corr[i + 1]);
    if (left_ok && right_ok) {
      peaks.push_back({i - max_lag, corr[i]});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const TdoaCandidate &a, const TdoaCandidate &b) {
    if (a.score != b.score) return a.score > b.score;
    return std::abs(a.lag_samples) < std::abs(b.lag_samples);
  });
  if (static_cast<int>(peaks.size()) > n_candidates) {
    peaks.resize(static_cast<size_t>(n_candidates));
  }
  return peaks;
}

std::vector<int> viterbi_select_channel(
    const std::vector<std::vector<TdoaCandidate>> &frames, double transition_weight,
    double noise_threshold_factor, int max_lag) {
  if (transition_weight < 0.0 || max_lag < 1) {
    throw std::invalid_argument("viterbi_select_channel: alpha >= 0 and max_lag >= 1 required");
  }
  const size_t num_frames = frames.size();

  // Keep frames that carry a trustworthy candidate: non-empty and with a best
  // score reaching the threshold against the running median of best scores.
  std::vector<bool> kept(num_frames, false);
  std::vector<double> best_history;
  for (size_t f = 0; f < num_frames; ++f) {
    if (frames[f].empty()) continue;
    const double best = frames[f].front().score;
    best_history.push_back(best);
    kept[f] = best >= noise_threshold_factor * median_sorted(best_history);
  }

  std::vector<size_t> kept_idx;
  for (size_t f = 0; f < num_frames; ++f) {
    if (kept[f]) kept_idx.push_back(f);
  }
  std::vector<int> track(num_frames, 0);
  if (kept_idx.empty()) return track;  // caller flags the all-empty case

  // DP over kept frames only; skipped frames hold the previous selection.
  const size_t stages = kept_idx.size();
  std::vector<std::vector<double>> total(stages);
  std::vector<std::vector<int>> backptr(stages);
  for (size_t s = 0; s < stages; ++s) {
    const auto &cands = frames[kept_idx[s]];
    total[s].assign(cands.size(), -std::numeric_limits<double>::infinity());
    backptr[s].assign(cands.size(), -1);
    for (size_t c = 0; c < cands.size(); ++c) {
      if (s == 0) {
        total[s][c] = cands[c].score;
        continue;
      }
      const auto &prev_cands = frames[kept_idx[s - 1]];
      for (size_t p = 0; p < prev_cands.size(); ++p) {
        const double jump =
            std::abs(cands[c].lag_samples - prev_cands[p].lag_samples);
        const double candidate_total =
            total[s - 1][p] + cands[c].score - transition_weight * jump / max_lag;
        if (candidate_total > total[s][c]) {
          total[s][c] = candidate_total;
          backptr[s][c] = static_cast<int>(p);
        }
      }
    }
  }

  int best_c = 0;
  for (size_t c = 1; c < total[stages - 1].size(); ++c) {
    if (total[stages - 1][c] > total[stages - 1][static_cast<size_t>(best_c)]) {
      best_c = static_cast<int>(c);
    }
  }
  std::vector<int> selected(stages, 0);
  for (size_t s = stages; s-- > 0;) {
    selected[s] = frames[kept_idx[s]][static_cast<size_t>(best_c)].lag_samples;
    if (s > 0) best_c = backptr[s][static_cast<size_t>(best_c)];
  }

  int hold = 0;
  size_t next_stage = 0;
  for (size_t f = 0; f < num_frames; ++f) {
    if (next_stage < stages && kept_idx[next_stage] == f) {
      hold = selected[next_stage];
      ++next_stage;
    }
    track[f] = hold;
  }
  return track;
}

std::vector<int> argmax_select_channel(
    const std::vector<std::vector<TdoaCandidate>> &frames) {
  std::vector<int> track(frames.size(), 0);
  int hold = 0;
  for (size_t f = 0; f < frames.size(); ++f) {
    if (!frames[f].empty()) hold = frames[f].front().lag_samples;
    track[f] = hold;
  }
  return track;
}

DelayTrack viterbi_delay_selection(const TdoaCandidateSet &candidates,
                                   double transition_weight,
                                   double noise_threshold_factor, int max_lag) {
  const int num_ch = candidates.num_channels;
  const Eigen::Index num_frames = static_cast<Eigen::Index>(candidates.frames.size());
  if (num_ch < 1 || candidates.reference_channel < 0 ||
      candidates.reference_channel >= num_ch) {
    throw std::invalid_argument("viterbi_delay_selection: bad channel bookkeeping");
  }

  DelayTrack track;
  track.delay_samples = Eigen::ArrayXXi::Zero(num_frames, num_ch);
  bool any_candidate = false;
  for (int ch = 0; ch < num_ch; ++ch) {
    if (ch == candidates.reference_channel) continue;
    std::vector<std::vector<TdoaCandidate>> channel_frames(
        static_cast<size_t>(num_frames));
    for (Eigen::Index f = 0; f < num_frames; ++f) {
      channel_frames[static_cast<size_t>(f)] =
          candidates.frames[static_cast<size_t>(f)][static_cast<size_t>(ch)];
      if (!channel_frames[static_cast<size_t>(f)].empty()) any_candidate = true;
    }
    const std::vector<int> path = viterbi_select_channel(
        channel_frames, transition_weight, noise_threshold_factor, max_lag);
    for (Eigen::Index f = 0; f < num_frames; ++f) {
      track.delay_samples(f, ch) = path[static_cast<size_t>(f)];
    }
  }
  track.from_empty_candidates = !any_candidate;
  return track;
}

}  // namespace beamsteer
