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

#include "beamsteer/cli.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "beamsteer/beamform.hpp"
#include "beamsteer/config.hpp"
#include "beamsteer/metrics.hpp"
#include "beamsteer/scene.hpp"
#include "beamsteer/servo.hpp"
#include "beamsteer/version.hpp"
#include "beamsteer/wav_io.hpp"

namespace beamsteer {
namespace {

namespace fs = std::filesystem;

// Thrown for problems the user must fix on the command line (exit 1), as
// opposed to data/validation problems (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_text_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

void write_json_file(const fs::path &path, const nlohmann::json &doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

void write_manifest(const fs::path &path, const std::string &subcommand,
                    const std::string &config_text, uint64_t seed,
                    const std::vector<std::string> &inputs,
                    const std::vector<std::string> &outputs) {
  nlohmann::json doc;
  doc["tool"] = kToolName;
  doc["version"] = kToolVersion;
  doc["subcommand"] = subcommand;
  doc["timestamp_utc"] = timestamp_utc();
  doc["seed"] = seed;
  doc["config"] = config_text;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  write_json_file(path, doc);
}

uint64_t resolve_seed(uint64_t config_seed, const std::optional<uint64_t> &flag_seed) {
  uint64_t seed = config_seed;
  if (const char *env = std::getenv("BEAMSTEER_SEED")) {
    try {
      size_t used = 0;
      seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception &) {
      throw std::runtime_error("BEAMSTEER_SEED must be an unsigned integer, got '" +
                               std::string(env) + "'");
    }
  }
  if (flag_seed.has_value()) seed = *flag_seed;
  return seed;
}

ToolConfig load_tool_config(const std::string &config_path, const std::string &preset) {
  if (!config_path.empty() && !preset.empty()) {
    throw UsageError("give either --config or --preset, not both");
  }
  if (!config_path.empty()) return parse_config_file(config_path);
  if (!preset.empty()) return preset_config(preset);
  throw UsageError("one of --config or --preset is required");
}

Eigen::ArrayXd first_channel(const MultichannelSignal &signal) {
  return signal.samples.col(0);
}

struct SimulateArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::optional<uint64_t> seed;
};

int cmd_simulate(const SimulateArgs &args) {
  ToolConfig cfg = load_tool_config(args.config_path, args.preset);
  cfg.resolve_seed(resolve_seed(cfg.scenario.seed, args.seed));
  const std::string resolved = serialize_config(cfg);

  const SceneResult scene = synthesize_scene(cfg.scenario);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);

  write_wav((dir / "scene.wav").string(), scene.mixture);
  MultichannelSignal clean_mono;
  clean_mono.sample_rate_hz = scene.clean_speech.sample_rate_hz;
  clean_mono.samples = scene.clean_speech.samples.col(cfg.scenario.geometry.reference_index);
  write_wav((dir / "clean.wav").string(), clean_mono);
  write_aoi_csv((dir / "aoi.csv").string(), scene.ground_truth_aoi);
  write_text_file(dir / "resolved_config.ini", resolved);

  nlohmann::json meta;
  meta["preset"] = cfg.scenario.preset_name;
  meta["seed"] = cfg.scenario.seed;
  meta["sample_rate_hz"] = scene.mixture.sample_rate_hz;
  meta["channels"] = scene.mixture.num_channels();
  meta["duration_s"] = cfg.scenario.duration_s;
  meta["head_mode"] = cfg.scenario.head_mode == HeadMode::kServo ? "servo" : "static_0deg";
  meta["clean_reference_channel"] = cfg.scenario.geometry.reference_index;
  meta["soft_limited"] = scene.soft_limited;
  meta["soft_limit_scale"] = scene.soft_limit_scale;
  meta["warnings"] = scene.warnings;
  write_json_file(dir / "metadata.json", meta);

  write_manifest(dir / "manifest.json", "simulate", resolved, cfg.scenario.seed,
                 args.config_path.empty() ? std::vector<std::string>{}
                                          : std::vector<std::string>{args.config_path},
                 {(dir / "scene.wav").string(), (dir / "clean.wav").string(),
                  (dir / "aoi.csv").string(), (dir / "metadata.json").string(),
                  (dir / "resolved_config.ini").string()});
  std::cout << "wrote scene to " << dir.string() << "\n";
  return 0;
}

int cmd_servo(const SimulateArgs &args) {
  ToolConfig cfg = load_tool_config(args.config_path, args.preset);
  cfg.resolve_seed(resolve_seed(cfg.scenario.seed, args.seed));
  if (cfg.scenario.head_mode != HeadMode::kServo) {
    throw std::invalid_argument("servo subcommand requires head mode 'servo' in the scenario");
  }
  const std::string resolved = serialize_config(cfg);

  const HeadSimResult sim = simulate_head(cfg.scenario);
  const AoiStats stats = aoi_stats(sim.aoi);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);

  write_aoi_csv((dir / "servo_aoi.csv").string(), sim.aoi);
  nlohmann::json report;
  report["mean_abs_deg"] = stats.mean_abs_deg;
  report["max_abs_deg"] = stats.max_abs_deg;
  report["rms_deg"] = stats.rms_deg;
  report["samples"] = static_cast<long>(sim.aoi.size());
  report["duration_s"] = cfg.scenario.duration_s;
  report["seed"] = cfg.scenario.servo.seed;
  write_json_file(dir / "servo_stats.json", report);

  write_manifest(dir / "manifest.json", "servo", resolved, cfg.scenario.seed,
                 args.config_path.empty() ? std::vector<std::string>{}
                                          : std::vector<std::string>{args.config_path},
                 {(dir / "servo_aoi.csv").string(), (dir / "servo_stats.json").string()});
  std::cout << "mean |AOI| " << stats.mean_abs_deg << " deg over " << cfg.scenario.duration_s
            << " s\n";
  return 0;
}

struct BeamformArgs {
  std::string in_path;
  std::string mode;
  std::string aoi_path;
  std::string config_path;
  std::string out_path;
  std::string diag_path;
  double window_s = 0.0;
};

int cmd_beamform(const BeamformArgs &args) {
  BeamformMode mode;
  try {
    mode = beamform_mode_from_string(args.mode);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  const bool needs_aoi = mode != BeamformMode::kWds;
  if (needs_aoi && args.aoi_path.empty()) {
    throw UsageError("mode " + args.mode + " requires --aoi");
  }
  if (!needs_aoi && !args.aoi_path.empty()) {
    throw UsageError("mode wds does not accept --aoi");
  }

  const MultichannelSignal input = read_wav(args.in_path);

  ToolConfig cfg;
  std::string config_echo;
  if (!args.config_path.empty()) {
    cfg = parse_config_file(args.config_path);
    if (std::abs(cfg.scenario.geometry.sample_rate_hz - input.sample_rate_hz) > 1e-6) {
      throw std::invalid_argument(
          "sample rate mismatch: config geometry at " +
          std::to_string(cfg.scenario.geometry.sample_rate_hz) + " Hz, input at " +
          std::to_string(input.sample_rate_hz) + " Hz");
    }
  } else {
    cfg.scenario.geometry.sample_rate_hz = input.sample_rate_hz;
  }
  if (cfg.scenario.geometry.num_channels() != input.num_channels()) {
    throw std::invalid_argument(
        "geometry has " + std::to_string(cfg.scenario.geometry.num_channels()) +
        " channels but input has " + std::to_string(input.num_channels()) +
        "; pass --config with matching mic_positions_m");
  }
  cfg.beamformer.mode = mode;
  if (args.window_s > 0.0) cfg.beamformer.window_s = args.window_s;

  std::optional<AoiTrack> aoi;
  if (needs_aoi) aoi = read_aoi_csv(args.aoi_path);

  const PipelineResult result = run_pipeline(input, cfg.beamformer, cfg.scenario.geometry, aoi);
  write_wav(args.out_path, result.output);

  const PipelineDiagnostics &diag = result.diagnostics;
  nlohmann::json doc;
  doc["mode"] = to_string(diag.config.mode);
  doc["window_s"] = diag.config.resolved_window_s();
  doc["reference_channel"] = diag.reference_channel;
  doc["frame_times_s"] =
      std::vector<double>(diag.frame_times_s.data(),
                          diag.frame_times_s.data() + diag.frame_times_s.size());
  doc["delay_samples"] = nlohmann::json::array();
  for (Eigen::Index f = 0; f < diag.delays.delay_samples.rows(); ++f) {
    std::vector<int> row(static_cast<size_t>(diag.delays.delay_samples.cols()));
    for (Eigen::Index ch = 0; ch < diag.delays.delay_samples.cols(); ++ch) {
      row[static_cast<size_t>(ch)] = diag.delays.delay_samples(f, ch);
    }
    doc["delay_samples"].push_back(row);
  }
  doc["weights"] = nlohmann::json::array();
  for (Eigen::Index f = 0; f < diag.weights.rows(); ++f) {
    std::vector<double> row(static_cast<size_t>(diag.weights.cols()));
    for (Eigen::Index ch = 0; ch < diag.weights.cols(); ++ch) {
      row[static_cast<size_t>(ch)] = diag.weights(f, ch);
    }
    doc["weights"].push_back(row);
  }
  doc["eliminated_channels"] = diag.eliminated_channels;
  doc["from_empty_candidates"] = diag.delays.from_empty_candidates;
  doc["notes"] = diag.notes;
  doc["stage_seconds"] = nlohmann::json::object();
  for (const auto &[stage, seconds] : diag.stage_seconds) {
    doc["stage_seconds"][stage] = seconds;
  }
  doc["config_echo"] = serialize_config(cfg);
  const fs::path diag_path = args.diag_path.empty()
                                 ? fs::path(args.out_path).replace_extension(".diag.json")
                                 : fs::path(args.diag_path);
  write_json_file(diag_path, doc);

  std::vector<std::string> inputs{args.in_path};
  if (!args.aoi_path.empty()) inputs.push_back(args.aoi_path);
  if (!args.config_path.empty()) inputs.push_back(args.config_path);
  write_manifest(fs::path(args.out_path + ".manifest.json"), "beamform",
                 serialize_config(cfg), cfg.scenario.seed, inputs,
                 {args.out_path, diag_path.string()});
  std::cout << "wrote " << args.out_path << "\n";
  return 0;
}

struct EvalArgs {
  std::string clean_path;
  std::string in_path;
  std::string out_path;
  std::string report_path;
  std::string aoi_path;
  std::string csv_path;
  std::string preset_label;
  std::string mode_label;
};

int cmd_eval(const EvalArgs &args) {
  const MultichannelSignal clean = read_wav(args.clean_path);
  const MultichannelSignal noisy = read_wav(args.in_path);
  const MultichannelSignal enhanced = read_wav(args.out_path);
  if (std::abs(clean.sample_rate_hz - noisy.sample_rate_hz) > 1e-6 ||
      std::abs(clean.sample_rate_hz - enhanced.sample_rate_hz) > 1e-6) {
    throw std::invalid_argument("sample rates of --clean, --in, and --out must match");
  }
  const Eigen::Index n =
      std::min({clean.num_samples(), noisy.num_samples(), enhanced.num_samples()});
  if (n < 2) throw std::invalid_argument("eval inputs too short");
  const Eigen::ArrayXd clean_ref = first_channel(clean).head(n);
  const Eigen::ArrayXd out_mono = first_channel(enhanced).head(n);

  MultichannelSignal noisy_trimmed;
  noisy_trimmed.sample_rate_hz = noisy.sample_rate_hz;
  noisy_trimmed.samples = noisy.samples.topRows(n);

  const int max_align = static_cast<int>(std::lround(0.5 * clean.sample_rate_hz));
  const AlignedSignal aligned =
      align_to_reference(clean_ref, out_mono, std::min<int>(max_align, static_cast<int>(n) - 1));

  const int best_ch = best_input_channel(clean_ref, noisy_trimmed);
  EvalRow row;
  row.preset = args.preset_label;
  row.mode = args.mode_label;
  row.snr_gain_db = snr_gain(clean_ref, noisy_trimmed.samples.col(best_ch), aligned.samples);
  row.si_sdr_db = si_sdr(aligned.samples, clean_ref);
  if (!args.aoi_path.empty()) {
    row.mean_abs_aoi_deg = aoi_stats(read_aoi_csv(args.aoi_path)).mean_abs_deg;
  }

  EvalReport report;
  report.rows.push_back(row);
  report.alignment_lag_samples = aligned.lag_samples;
  report.config_echo = "clean=" + args.clean_path + " in=" + args.in_path +
                       " out=" + args.out_path;
  write_eval_report_json(args.report_path, report);
  const fs::path csv_path = args.csv_path.empty()
                                ? fs::path(args.report_path).replace_extension(".csv")
                                : fs::path(args.csv_path);
  write_eval_report_csv(csv_path.string(), report);

  std::vector<std::string> inputs{args.clean_path, args.in_path, args.out_path};
  if (!args.aoi_path.empty()) inputs.push_back(args.aoi_path);
  write_manifest(fs::path(args.report_path + ".manifest.json"), "eval", report.config_echo,
                 report.seed, inputs, {args.report_path, csv_path.string()});
  std::cout << "snr_gain_db " << row.snr_gain_db << ", si_sdr_db " << row.si_sdr_db << "\n";
  return 0;
}

int cmd_presets() {
  for (const std::string &name : preset_names()) {
    std::cout << name << "  " << preset_summary(name) << "\n";
  }
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string> &args) {
  CLI::App app{"delay-and-sum beamforming testbed", kToolName};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App *sim = app.add_subcommand("simulate", "synthesize a multichannel scene");
  sim->add_option("--config", sim_args.config_path, "scenario config file");
  sim->add_option("--preset", sim_args.preset, "preset name (NST-1, NST-2, VbST-1, VbST-2)");
  sim->add_option("--seed", sim_args.seed, "seed override (wins over BEAMSTEER_SEED)");
  sim->add_option("--out", sim_args.out_dir, "output directory")->required();

  SimulateArgs servo_args;
  CLI::App *srv = app.add_subcommand("servo", "run the head-tracking simulation");
  srv->add_option("--config", servo_args.config_path, "scenario config file");
  srv->add_option("--preset", servo_args.preset, "preset name");
  srv->add_option("--seed", servo_args.seed, "seed override (wins over BEAMSTEER_SEED)");
  srv->add_option("--out", servo_args.out_dir, "output directory")->required();

  BeamformArgs bf_args;
  CLI::App *bf = app.add_subcommand("beamform", "beamform a multichannel WAV");
  bf->add_option("--in", bf_args.in_path, "input N-channel WAV")->required();
  bf->add_option("--mode", bf_args.mode, "wds, wds-aoi, or ds-aoi")->required();
  bf->add_option("--aoi", bf_args.aoi_path, "AOI track CSV (required for the aoi modes)");
  bf->add_option("--window", bf_args.window_s, "analysis window seconds");
  bf->add_option("--config", bf_args.config_path, "config file with geometry/beamformer");
  bf->add_option("--out", bf_args.out_path, "output mono WAV")->required();
  bf->add_option("--diag", bf_args.diag_path, "diagnostics JSON path");

  EvalArgs ev_args;
  CLI::App *ev = app.add_subcommand("eval", "score an enhanced signal");
  ev->add_option("--clean", ev_args.clean_path, "clean reference WAV")->required();
  ev->add_option("--in", ev_args.in_path, "noisy multichannel WAV")->required();
  ev->add_option("--out", ev_args.out_path, "enhanced mono WAV")->required();
  ev->add_option("--report", ev_args.report_path, "report JSON path")->required();
  ev->add_option("--csv", ev_args.csv_path, "report CSV path");
  ev->add_option("--aoi", ev_args.aoi_path, "realized AOI CSV for the aoi statistic");
  ev->add_option("--preset", ev_args.preset_label, "preset label for the report row");
  ev->add_option("--mode", ev_args.mode_label, "mode label for the report row");

  CLI::App *pr = app.add_subcommand("presets", "list scenario presets");

  std::vector<const char *> argv;
  argv.push_back(kToolName);
  for (const std::string &arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (srv->parsed()) return cmd_servo(servo_args);
    if (bf->parsed()) return cmd_beamform(bf_args);
    if (ev->parsed()) return cmd_eval(ev_args);
    if (pr->parsed()) return cmd_presets();
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace beamsteer
