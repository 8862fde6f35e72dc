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

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "beamsteer/signal.hpp"

namespace beamsteer {

/// One GCC-PHAT peak. Lags are positive when the probed channel arrives
/// later than the reference (steering then advances it by the lag).
struct TdoaCandidate {
  int lag_samples = 0;
  double score = 0.0;  // in [-1, 1]
};

/// Candidates per frame per channel, sorted by descending score. The
/// reference channel's lists stay empty by construction.
struct TdoaCandidateSet {
  int reference_channel = 0;
  int num_channels = 0;
  // frames[f][ch], each sorted by descending score, at most N entries.
  std::vector<std::vector<std::vector<TdoaCandidate>>> frames;
};

/// Per frame, per channel: the selected steering delay in samples. The
/// reference channel is 0 in every frame.
struct DelayTrack {
  Eigen::ArrayXXi delay_samples;  // rows = frames, cols = channels
  bool from_empty_candidates = false;
};

/// Index maximizing the mean, over analysis windows and channel pairs, of
/// the peak normalized cross-correlation with every other channel; ties go
/// to the lowest index.
int select_reference(const MultichannelSignal &mc, double window_s, int max_lag);

/// N best local maxima of the PHAT-weighted cross-correlation between the
/// reference frame and the probed frame, restricted to |lag| <= max_lag.
/// A zero-energy frame yields an empty set.
std::vector<TdoaCandidate> gcc_phat_candidates(
    const Eigen::Ref<const Eigen::ArrayXd> &frame_ref,
    const Eigen::Ref<const Eigen::ArrayXd> &frame_n, int n_candidates, int max_lag);

/// Single-channel Viterbi smoothing over per-frame candidate lists: node
/// score = GCC score, transition score = -alpha * |lag_t - lag_prev| /
/// max_lag. Frames that are empty or whose best score falls below
/// noise_threshold_factor times the running median of best scores hold the
/// previous selected lag (initially 0).
std::vector<int> viterbi_select_channel(
    const std::vector<std::vector<TdoaCandidate>> &frames, double transition_weight,
    double noise_threshold_factor, int max_lag);

/// Per-frame argmax baseline: top candidate, holding the previous lag on
/// empty frames. Used for paired comparisons against the Viterbi path.
std::vector<int> argmax_select_channel(
    const std::vector<std::vector<TdoaCandidate>> &frames);

/// Applies viterbi_select_channel to every non-reference channel.
DelayTrack viterbi_delay_selection(const TdoaCandidateSet &candidates,
                                   double transition_weight,
                                   double noise_threshold_factor, int max_lag);

}  // namespace beamsteer
