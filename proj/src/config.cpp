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

#include "beamsteer/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace beamsteer {
namespace {

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const Eigen::ArrayXd &values) {
  std::string out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt_double(values[i]);
  }
  return out;
}

std::string fmt_vec2(const Eigen::Vector2d &v) {
  return fmt_double(v.x()) + ", " + fmt_double(v.y());
}

// Parsed file: section -> ordered key/value pairs. Key order inside a
// section is preserved so later duplicates can be rejected.
struct RawConfig {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
};

RawConfig tokenize(const std::string &text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      }
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    }
    if (!seen.insert({section, key}).second) {
      throw std::invalid_argument("config: duplicate key '" + key + "' in section [" +
                                  section + "]");
    }
    raw.sections[section].push_back({key, value});
  }
  return raw;
}

std::string unquote(const std::string &value, const std::string &key) {
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    return value.substr(1, value.size() - 2);
  }
  if (!value.empty() && (value.front() == '"' || value.back() == '"')) {
    throw std::invalid_argument("config key '" + key + "': unbalanced quotes");
  }
  return value;
}

double parse_double(const std::string &value, const std::string &key) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception &) {
    throw std::invalid_argument("config key '" + key + "': non-numeric value '" + value +
                                "'");
  }
}

uint64_t parse_uint(const std::string &value, const std::string &key) {
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return static_cast<uint64_t>(v);
  } catch (const std::exception &) {
    throw std::invalid_argument("config key '" + key + "': expected unsigned integer, got '" +
                                value + "'");
  }
}

int parse_int(const std::string &value, const std::string &key) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception &) {
    throw std::invalid_argument("config key '" + key + "': expected integer, got '" + value +
                                "'");
  }
}

bool parse_bool(const std::string &value, const std::string &key) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw std::invalid_argument("config key '" + key + "': expected true or false, got '" +
                              value + "'");
}

Eigen::ArrayXd parse_list(const std::string &value, const std::string &key) {
  std::vector<double> items;
  std::istringstream in(value);
  std::string field;
  while (std::getline(in, field, ',')) {
    const std::string t = trim(field);
    if (t.empty()) {
      throw std::invalid_argument("config key '" + key + "': empty list element");
    }
    items.push_back(parse_double(t, key));
  }
  if (items.empty()) {
    throw std::invalid_argument("config key '" + key + "': empty list");
  }
  return Eigen::Map<Eigen::ArrayXd>(items.data(), static_cast<Eigen::Index>(items.size()));
}

Eigen::Vector2d parse_vec2(const std::string &value, const std::string &key) {
  const Eigen::ArrayXd list = parse_list(value, key);
  if (list.size() != 2) {
    throw std::invalid_argument("config key '" + key + "': expected x, y pair");
  }
  return {list[0], list[1]};
}

struct GeometryDraft {
  Eigen::ArrayXd positions;
  int reference_index = 0;
  double sound_speed = 343.0;
  double sample_rate = 16000.0;
  bool positions_seen = false;
};

}  // namespace

void ToolConfig::resolve_seed(uint64_t seed) {
  scenario.seed = seed;
  if (!servo_seed_explicit) scenario.servo.seed = seed;
}

ToolConfig preset_config(const std::string &name) {
  ToolConfig cfg;
  ScenarioConfig &sc = cfg.scenario;
  sc.geometry = ArrayGeometry::default_array();
  sc.p1_m = {-1.0, 0.0};
  sc.p3_m = {1.0, 0.0};
  sc.p2_m = {0.0, 0.0};
  sc.v_max_mps = 0.45;
  sc.accel_mps2 = 0.9;
  sc.duration_s = 20.0;
  sc.speech_source.position_m = {0.0, 2.0};
  sc.speech_source.audio = "synth:speech";
  // Noise placings are documented placeholders: bearings +45 and -60 deg
  // from the path midpoint, both 2 m out.
  SourceConfig noise1;
  noise1.position_m = {2.0 * std::sin(deg_to_rad(45.0)), 2.0 * std::cos(deg_to_rad(45.0))};
  noise1.audio = "synth:babble";
  noise1.snr_db = 5.0;
  SourceConfig noise2;
  noise2.position_m = {2.0 * std::sin(deg_to_rad(-60.0)), 2.0 * std::cos(deg_to_rad(-60.0))};
  noise2.audio = "synth:babble";
  noise2.snr_db = 5.0;

  if (name == "NST-1") {
    sc.head_mode = HeadMode::kStatic0Deg;
    sc.noise_sources = {noise1};
  } else if (name == "NST-2") {
    sc.head_mode = HeadMode::kStatic0Deg;
    sc.noise_sources = {noise1, noise2};
  } else if (name == "VbST-1") {
    sc.head_mode = HeadMode::kServo;
    sc.noise_sources = {noise1};
  } else if (name == "VbST-2") {
    sc.head_mode = HeadMode::kServo;
    sc.noise_sources = {noise1, noise2};
  } else {
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected NST-1, NST-2, VbST-1, VbST-2)");
  }
  sc.preset_name = name;
  return cfg;
}

std::vector<std::string> preset_names() { return {"NST-1", "NST-2", "VbST-1", "VbST-2"}; }

std::string preset_summary(const std::string &name) {
  if (name == "NST-1") return "static head, one noise source at +45 deg, 2 m";
  if (name == "NST-2") return "static head, noise sources at +45 and -60 deg, 2 m";
  if (name == "VbST-1") return "servo head, one noise source at +45 deg, 2 m";
  if (name == "VbST-2") return "servo head, noise sources at +45 and -60 deg, 2 m";
  throw std::invalid_argument("unknown preset '" + name + "'");
}

ToolConfig parse_config_text(const std::string &text) {
  const RawConfig raw = tokenize(text);

  // Pass 1: preset selection comes first, every other key overrides it.
  ToolConfig cfg;
  bool preset_used = false;
  if (auto top = raw.sections.find(""); top != raw.sections.end()) {
    for (const auto &[key, value] : top->second) {
      if (key == "preset") {
        cfg = preset_config(unquote(value, key));
        preset_used = true;
      }
    }
  }

  GeometryDraft geo;
  geo.positions = cfg.scenario.geometry.mic_offsets_m;
  geo.reference_index = cfg.scenario.geometry.reference_index;
  geo.sound_speed = cfg.scenario.geometry.sound_speed_mps;
  geo.sample_rate = cfg.scenario.geometry.sample_rate_hz;
  bool geometry_section_seen = false;
  bool p2_seen = false;
  std::set<std::string> new_noise_needs_position;

  for (const auto &[section, entries] : raw.sections) {
    for (const auto &[key, value] : entries) {
      if (section.empty()) {
        if (key == "preset") continue;  // handled above
        if (key == "seed") {
          cfg.scenario.seed = parse_uint(value, key);
        } else if (key == "duration_s") {
          cfg.scenario.duration_s = parse_double(value, key);
        } else {
          throw std::invalid_argument("config: unknown top-level key '" + key + "'");
        }
      } else if (section == "geometry") {
        geometry_section_seen = true;
        if (key == "mic_positions_m") {
          geo.positions = parse_list(value, key);
          geo.positions_seen = true;
        } else if (key == "reference_index") {
          geo.reference_index = parse_int(value, key);
        } else if (key == "sound_speed_mps") {
          geo.sound_speed = parse_double(value, key);
        } else if (key == "sample_rate_hz") {
          geo.sample_rate = parse_double(value, key);
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [geometry]");
        }
      } else if (section == "base") {
        if (key == "p1_m") {
          cfg.scenario.p1_m = parse_vec2(value, key);
        } else if (key == "p3_m") {
          cfg.scenario.p3_m = parse_vec2(value, key);
        } else if (key == "p2_m") {
          cfg.scenario.p2_m = parse_vec2(value, key);
          p2_seen = true;
        } else if (key == "v_max_mps") {
          cfg.scenario.v_max_mps = parse_double(value, key);
        } else if (key == "accel_mps2") {
          cfg.scenario.accel_mps2 = parse_double(value, key);
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [base]");
        }
      } else if (section == "head") {
        if (key == "mode") {
          const std::string mode = unquote(value, key);
          if (mode == "static_0deg") {
            cfg.scenario.head_mode = HeadMode::kStatic0Deg;
          } else if (mode == "servo") {
            cfg.scenario.head_mode = HeadMode::kServo;
          } else {
            throw std::invalid_argument(
                "config key 'mode': expected static_0deg or servo, got '" + mode + "'");
          }
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [head]");
        }
      } else if (section == "speech") {
        if (key == "position_m") {
          cfg.scenario.speech_source.position_m = parse_vec2(value, key);
        } else if (key == "audio") {
          cfg.scenario.speech_source.audio = unquote(value, key);
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [speech]");
        }
      } else if (section == "noise.1" || section == "noise.2") {
        const size_t index = section == "noise.1" ? 0 : 1;
        if (index == 1 && cfg.scenario.noise_sources.empty()) {
          throw std::invalid_argument("config: [noise.2] given without [noise.1]");
        }
        if (cfg.scenario.noise_sources.size() <= index) {
          cfg.scenario.noise_sources.push_back(SourceConfig{{0.0, 0.0}, "synth:babble", 5.0});
          new_noise_needs_position.insert(section);
        }
        SourceConfig &src = cfg.scenario.noise_sources[index];
        if (key == "position_m") {
          src.position_m = parse_vec2(value, key);
          new_noise_needs_position.erase(section);
        } else if (key == "audio") {
          src.audio = unquote(value, key);
        } else if (key == "snr_db") {
          src.snr_db = parse_double(value, key);
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [" + section +
                                      "]");
        }
      } else if (section == "servo") {
        ServoConfig &sv = cfg.scenario.servo;
        if (key == "detector_period_s") {
          sv.detector_period_s = parse_double(value, key);
        } else if (key == "detector_latency_s") {
          sv.detector_latency_s = parse_double(value, key);
        } else if (key == "detector_noise_std_deg") {
          sv.detector_noise_std_deg = parse_double(value, key);
        } else if (key == "detector_dropout_prob") {
          sv.detector_dropout_prob = parse_double(value, key);
        } else if (key == "deadband_deg") {
          sv.deadband_deg = parse_double(value, key);
        } else if (key == "proportional_gain") {
          sv.proportional_gain = parse_double(value, key);
        } else if (key == "head_rate_limit_deg_s") {
          sv.head_rate_limit_deg_s = parse_double(value, key);
        } else if (key == "head_yaw_limit_deg") {
          sv.head_yaw_limit_deg = parse_double(value, key);
        } else if (key == "seed") {
          sv.seed = parse_uint(value, key);
          cfg.servo_seed_explicit = true;
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [servo]");
        }
      } else if (section == "scene") {
        ScenarioConfig &sc = cfg.scenario;
        if (key == "ego_noise_enabled") {
          sc.ego_noise_enabled = parse_bool(value, key);
        } else if (key == "ego_noise_snr_db") {
          sc.ego_noise_snr_db = parse_double(value, key);
        } else if (key == "rt60_s") {
          sc.rt60_s = parse_double(value, key);
        } else if (key == "utterance_gap_s") {
          sc.utterance_gap_s = parse_double(value, key);
        } else if (key == "utterance_len_s") {
          sc.utterance_len_s = parse_double(value, key);
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [scene]");
        }
      } else if (section == "beamformer") {
        BeamformerConfig &bf = cfg.beamformer;
        if (key == "mode") {
          bf.mode = beamform_mode_from_string(unquote(value, key));
        } else if (key == "window_s") {
          bf.window_s = parse_double(value, key);
        } else if (key == "n_candidates") {
          bf.n_candidates = parse_int(value, key);
        } else if (key == "noise_threshold_factor") {
          bf.noise_threshold_factor = parse_double(value, key);
        } else if (key == "viterbi_transition_weight") {
          bf.viterbi_transition_weight = parse_double(value, key);
        } else if (key == "weight_adapt_rate") {
          bf.weight_adapt_rate = parse_double(value, key);
        } else if (key == "channel_elim_threshold") {
          bf.channel_elim_threshold = parse_double(value, key);
        } else if (key == "wiener_enabled") {
          bf.wiener_enabled = parse_bool(value, key);
        } else {
          throw std::invalid_argument("config: unknown key '" + key + "' in [beamformer]");
        }
      } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
      }
    }
  }

  if (!preset_used && !geometry_section_seen) {
    throw std::invalid_argument("config: missing geometry section (or a preset)");
  }
  if (!new_noise_needs_position.empty()) {
    throw std::invalid_argument("config: [" + *new_noise_needs_position.begin() +
                                "] requires position_m");
  }
  if (geometry_section_seen && geo.positions_seen) {
    cfg.scenario.geometry = ArrayGeometry::from_positions(geo.positions, geo.reference_index,
                                                          geo.sound_speed, geo.sample_rate);
  } else {
    // Preset geometry with possible scalar tweaks.
    cfg.scenario.geometry.sound_speed_mps = geo.sound_speed;
    cfg.scenario.geometry.sample_rate_hz = geo.sample_rate;
    if (geometry_section_seen) {
      cfg.scenario.geometry = ArrayGeometry::from_positions(
          cfg.scenario.geometry.mic_offsets_m, geo.reference_index, geo.sound_speed,
          geo.sample_rate);
    }
  }
  if (!p2_seen) {
    cfg.scenario.p2_m = 0.5 * (cfg.scenario.p1_m + cfg.scenario.p3_m);
  }
  if (!cfg.servo_seed_explicit) {
    cfg.scenario.servo.seed = cfg.scenario.seed;
  }
  cfg.scenario.validate();
  cfg.beamformer.validate();
  return cfg;
}

ToolConfig parse_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ScenarioConfig parse_scenario_config(const std::string &path) {
  return parse_config_file(path).scenario;
}

std::string serialize_config(const ToolConfig &cfg) {
  const ScenarioConfig &sc = cfg.scenario;
  std::ostringstream out;
  out << "# resolved configuration; parse of this file reproduces it exactly\n";
  if (!sc.preset_name.empty()) out << "preset = \"" << sc.preset_name << "\"\n";
  out << "seed = " << sc.seed << "\n";
  out << "duration_s = " << fmt_double(sc.duration_s) << "\n";

  out << "\n[geometry]\n";
  out << "mic_positions_m = " << fmt_list(sc.geometry.mic_offsets_m) << "\n";
  out << "reference_index = " << sc.geometry.reference_index << "\n";
  out << "sound_speed_mps = " << fmt_double(sc.geometry.sound_speed_mps) << "\n";
  out << "sample_rate_hz = " << fmt_double(sc.geometry.sample_rate_hz) << "\n";

  out << "\n[base]\n";
  out << "p1_m = " << fmt_vec2(sc.p1_m) << "\n";
  out << "p3_m = " << fmt_vec2(sc.p3_m) << "\n";
  out << "p2_m = " << fmt_vec2(sc.p2_m) << "\n";
  out << "v_max_mps = " << fmt_double(sc.v_max_mps) << "\n";
  out << "accel_mps2 = " << fmt_double(sc.accel_mps2) << "\n";

  out << "\n[head]\n";
  out << "mode = \"" << (sc.head_mode == HeadMode::kServo ? "servo" : "static_0deg")
      << "\"\n";

  out << "\n[speech]\n";
  out << "position_m = " << fmt_vec2(sc.speech_source.position_m) << "\n";
  out << "audio = \"" << sc.speech_source.audio << "\"\n";

  for (size_t i = 0; i < sc.noise_sources.size(); ++i) {
    out << "\n[noise." << (i + 1) << "]\n";
    out << "position_m = " << fmt_vec2(sc.noise_sources[i].position_m) << "\n";
    out << "audio = \"" << sc.noise_sources[i].audio << "\"\n";
    out << "snr_db = " << fmt_double(sc.noise_sources[i].snr_db) << "\n";
  }

  out << "\n[servo]\n";
  out << "detector_period_s = " << fmt_double(sc.servo.detector_period_s) << "\n";
  out << "detector_latency_s = " << fmt_double(sc.servo.detector_latency_s) << "\n";
  out << "detector_noise_std_deg = " << fmt_double(sc.servo.detector_noise_std_deg) << "\n";
  out << "detector_dropout_prob = " << fmt_double(sc.servo.detector_dropout_prob) << "\n";
  out << "deadband_deg = " << fmt_double(sc.servo.deadband_deg) << "\n";
  out << "proportional_gain = " << fmt_double(sc.servo.proportional_gain) << "\n";
  out << "head_rate_limit_deg_s = " << fmt_double(sc.servo.head_rate_limit_deg_s) << "\n";
  out << "head_yaw_limit_deg = " << fmt_double(sc.servo.head_yaw_limit_deg) << "\n";
  out << "seed = " << sc.servo.seed << "\n";

  out << "\n[scene]\n";
  out << "ego_noise_enabled = " << (sc.ego_noise_enabled ? "true" : "false") << "\n";
  out << "ego_noise_snr_db = " << fmt_double(sc.ego_noise_snr_db) << "\n";
  out << "rt60_s = " << fmt_double(sc.rt60_s) << "\n";
  out << "utterance_gap_s = " << fmt_double(sc.utterance_gap_s) << "\n";
  out << "utterance_len_s = " << fmt_double(sc.utterance_len_s) << "\n";

  const BeamformerConfig &bf = cfg.beamformer;
  out << "\n[beamformer]\n";
  out << "mode = \"" << to_string(bf.mode) << "\"\n";
  out << "window_s = " << fmt_double(bf.window_s) << "\n";
  out << "n_candidates = " << bf.n_candidates << "\n";
  out << "noise_threshold_factor = " << fmt_double(bf.noise_threshold_factor) << "\n";
  out << "viterbi_transition_weight = " << fmt_double(bf.viterbi_transition_weight) << "\n";
  out << "weight_adapt_rate = " << fmt_double(bf.weight_adapt_rate) << "\n";
  out << "channel_elim_threshold = " << fmt_double(bf.channel_elim_threshold) << "\n";
  out << "wiener_enabled = " << (bf.wiener_enabled ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace beamsteer
