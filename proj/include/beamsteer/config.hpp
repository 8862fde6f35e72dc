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

#include "beamsteer/beamform.hpp"
#include "beamsteer/scene.hpp"

namespace beamsteer {

/// Scenario plus beamformer settings as read from one INI-style file.
/// Grammar: `key = value` lines under `[section]` headers; `#` or `;` start
/// comments; strings may be double-quoted; lists are comma-separated
/// numbers. Unknown sections or keys are errors (strict mode).
struct ToolConfig {
  ScenarioConfig scenario;
  BeamformerConfig beamformer;
  bool servo_seed_explicit = false;

  /// Applies the scenario seed to the servo block unless the file pinned
  /// the servo seed itself. Call after any --seed / env override.
  void resolve_seed(uint64_t seed);
};

ToolConfig parse_config_text(const std::string &text);
ToolConfig parse_config_file(const std::string &path);

/// Fully resolved, defaults included; parsing the output reproduces the
/// config exactly (doubles use round-trip formatting).
std::string serialize_config(const ToolConfig &cfg);

/// Scenario-only view of parse_config_file.
ScenarioConfig parse_scenario_config(const std::string &path);

/// NST-1, NST-2 (static head, one / two noise sources), VbST-1, VbST-2
/// (servo head, one / two noise sources). Unknown name throws
/// std::invalid_argument.
ToolConfig preset_config(const std::string &name);
std::vector<std::string> preset_names();
std::string preset_summary(const std::string &name);

}  // namespace beamsteer
