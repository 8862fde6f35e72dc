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

#include <string>

#include "beamsteer/signal.hpp"

namespace beamsteer {

/// Reads a RIFF/WAVE file. Accepts 16-bit PCM and 32-bit IEEE float,
/// any channel count. PCM samples are scaled to [-1, 1) by 1/32768.
MultichannelSignal read_wav(const std::string &path);

/// Writes 32-bit IEEE float WAVE, interleaved, one column per channel.
void write_wav(const std::string &path, const MultichannelSignal &signal);

}  // namespace beamsteer
