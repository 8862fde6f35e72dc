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
#include <vector>

namespace beamsteer {

/// Exit codes: 0 success, 1 usage error, 2 data or validation error.
/// `args` is the command line without the program name, e.g.
/// {"simulate", "--config", "scene.ini", "--out", "run1"}.
///
/// Subcommands: simulate, servo, beamform, eval, presets. The environment
/// variable BEAMSTEER_SEED overrides the config seed; an explicit --seed
/// flag wins over both. Every run writes a manifest recording the resolved
/// config, seed, version, and all file paths.
int dispatch(const std::vector<std::string> &args);

}  // namespace beamsteer
