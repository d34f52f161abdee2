// Copyright 2026 The Windguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// windguard: command-line front end for detection, suppression, training and
// evaluation. Exit codes: 0 success, 2 configuration error, 3 data error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "windguard/config.h"
#include "windguard/errors.h"
#include "windguard/eval.h"
#include "windguard/model_io.h"
#include "windguard/stream.h"
#include "windguard/suppressor.h"
#include "windguard/synth.h"
#include "windguard/wav.h"

namespace wg = windguard;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

void AddCommon(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "Pipeline config file (INI)");
  cmd->add_option("--seed", common.seed, "Random seed, overrides [run] seed");
}

wg::PipelineConfig LoadPipeline(const Common& common) {
  wg::PipelineConfig cfg;
  if (!common.config_path.empty()) cfg = wg::LoadConfig(common.config_path);
  if (common.seed) cfg.seed = *common.seed;
  cfg.training.seed = cfg.seed;
  cfg.Validate();
  return cfg;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw wg::DataError("cannot open " + path + " for writing");
  f << text;
}

void WriteJson(const std::string& path, const nlohmann::json& j) {
  WriteText(path, j.dump(2) + "\n");
}

std::string ModelPath(const std::string& flag, const wg::PipelineConfig& cfg) {
  const std::string path = flag.empty() ? cfg.paths.model : flag;
  if (path.empty()) throw wg::ConfigError("no model path: pass --model or set [paths] model");
  return path;
}

wg::NnModel LoadCheckedModel(const std::string& path, const wg::PipelineConfig& cfg) {
  wg::NnModel model = wg::LoadModel(path);
  wg::CheckModelMatchesConfig(model, cfg);
  return model;
}

wg::MultiChannelAudio ReadInput(const std::string& path, const wg::PipelineConfig& cfg) {
  wg::MultiChannelAudio audio = wg::ReadWav(path);
  if (audio.sample_rate != cfg.sample_rate) {
    throw wg::DataError(path + " has sample rate " + std::to_string(audio.sample_rate) +
                        " Hz; config expects " + std::to_string(cfg.sample_rate) + " Hz");
  }
  return audio;
}

// Chunk truth CSV: header "chunk_index,wind", then one row per chunk.
std::vector<bool> ReadLabels(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw wg::DataError("cannot open label file " + path);
  std::string line;
  std::getline(f, line);
  std::vector<bool> labels;
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::size_t index = 0;
    int value = -1;
    try {
      index = std::stoul(line.substr(0, comma));
      value = comma == std::string::npos ? -1 : std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      value = -1;
    }
    if (index != labels.size() || (value != 0 && value != 1)) {
      throw wg::DataError(path + ": malformed label row " + std::to_string(row));
    }
    labels.push_back(value == 1);
  }
  return labels;
}

std::string FormatLabels(const std::vector<bool>& labels) {
  std::ostringstream o;
  o << "chunk_index,wind\n";
  for (std::size_t i = 0; i < labels.size(); ++i) o << i << "," << (labels[i] ? 1 : 0) << "\n";
  return o.str();
}

std::string DecisionCsv(const std::vector<wg::WindDecision>& trace) {
  std::ostringstream o;
  wg::WriteDecisionCsv(o, trace);
  return o.str();
}

wg::Gust ParseGust(const std::string& text, double ramp_ms) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw wg::ConfigError("gust '" + text + "' must be START:END");
  try {
    return wg::Gust{std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1)), ramp_ms};
  } catch (const std::exception&) {
    throw wg::ConfigError("gust '" + text + "' must be START:END in seconds");
  }
}

wg::WavFormat Format(bool pcm16) { return pcm16 ? wg::WavFormat::kPcm16 : wg::WavFormat::kFloat32; }

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

wg::CalibrationGrid DefaultGrid() {
  return {wg::Linspace(0.3, 0.95, 27), wg::Linspace(0.5, 0.98, 25), {0.25, 0.35, 0.5}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind noise detection and suppression for two-microphone audio"};
  app.require_subcommand(1);

  // synth
  Common synth_common;
  std::string synth_level = "medium", synth_out, synth_clean, synth_labels, synth_speech;
  double synth_duration = 10.0, synth_ramp = 100.0;
  std::vector<std::string> synth_gusts;
  bool synth_pcm16 = false;
  auto* synth = app.add_subcommand("synth", "Generate a labelled two-channel scene");
  AddCommon(synth, synth_common);
  synth->add_option("--level", synth_level, "none, low, medium or high")->capture_default_str();
  synth->add_option("--duration", synth_duration, "Scene length in seconds")->capture_default_str();
  synth->add_option("--gust", synth_gusts, "Gust START:END in seconds (repeatable); default is wind throughout");
  synth->add_option("--ramp-ms", synth_ramp, "Gust ramp length")->capture_default_str();
  synth->add_option("--speech-wav", synth_speech, "Use this mono WAV instead of the speech proxy");
  synth->add_option("--out", synth_out, "Noisy two-channel WAV")->required();
  synth->add_option("--clean-out", synth_clean, "Clean reference WAV");
  synth->add_option("--labels-out", synth_labels, "Chunk truth CSV");
  synth->add_flag("--pcm16", synth_pcm16, "Write 16-bit PCM instead of float");

  // detect
  Common detect_common;
  std::string detect_in, detect_csv, detect_labels, detect_report;
  auto* detect = app.add_subcommand("detect", "Per-chunk wind decisions for a WAV file");
  AddCommon(detect, detect_common);
  detect->add_option("--in", detect_in, "Input WAV (>= 2 channels)")->required();
  detect->add_option("--csv", detect_csv, "Decision trace CSV (default stdout)");
  detect->add_option("--labels", detect_labels, "Chunk truth CSV; enables the metrics report");
  detect->add_option("--report", detect_report, "Metrics JSON (default stdout)");

  // suppress
  Common suppress_common;
  std::string suppress_in, suppress_model, suppress_out;
  bool suppress_pcm16 = false;
  auto* suppress = app.add_subcommand("suppress", "Reconstruct the low band of a WAV file");
  AddCommon(suppress, suppress_common);
  suppress->add_option("--in", suppress_in, "Input WAV")->required();
  suppress->add_option("--model", suppress_model, "Model file (default [paths] model)");
  suppress->add_option("--out", suppress_out, "Output mono WAV")->required();
  suppress->add_flag("--pcm16", suppress_pcm16, "Write 16-bit PCM instead of float");

  // train
  Common train_common;
  std::string train_out, train_report;
  double train_minutes = 5.0, train_scene_s = 30.0;
  std::vector<std::string> train_noisy, train_clean;
  auto* train = app.add_subcommand("train", "Train a suppressor model");
  AddCommon(train, train_common);
  train->add_option("--out", train_out, "Model file (default [paths] model)");
  train->add_option("--minutes", train_minutes, "Synthetic training audio, in minutes")->capture_default_str();
  train->add_option("--scene-seconds", train_scene_s, "Length of each synthetic scene")->capture_default_str();
  train->add_option("--noisy", train_noisy, "Noisy WAV (repeatable; replaces synthetic data)");
  train->add_option("--clean", train_clean, "Clean WAV matching each --noisy");
  train->add_option("--report", train_report, "Training summary JSON (default stdout)");

  // eval
  Common eval_common;
  std::string eval_level = "medium", eval_model, eval_report;
  std::size_t eval_scenes = 20;
  double eval_duration = 60.0;
  auto* eval = app.add_subcommand("eval", "Score detection, and optionally suppression, on synthetic scenes");
  AddCommon(eval, eval_common);
  eval->add_option("--level", eval_level, "Wind level of the scenes")->capture_default_str();
  eval->add_option("--scenes", eval_scenes, "Number of scenes")->capture_default_str();
  eval->add_option("--duration", eval_duration, "Scene length in seconds")->capture_default_str();
  eval->add_option("--model", eval_model, "Also score reconstruction with this model");
  eval->add_option("--report", eval_report, "Report JSON (default stdout)");

  // stream
  Common stream_common;
  std::string stream_in, stream_model, stream_csv, stream_out, stream_report;
  bool stream_pcm16 = false;
  auto* stream = app.add_subcommand("stream", "Chunk-by-chunk processing of a WAV file");
  AddCommon(stream, stream_common);
  stream->add_option("--in", stream_in, "Input WAV (>= 2 channels)")->required();
  stream->add_option("--model", stream_model, "Enable suppression with this model");
  stream->add_option("--csv", stream_csv, "Decision trace CSV");
  stream->add_option("--out", stream_out, "Reconstructed mono WAV (needs --model)");
  stream->add_option("--report", stream_report, "Timing summary JSON (default stdout)");
  stream->add_flag("--pcm16", stream_pcm16, "Write 16-bit PCM instead of float");

  // calibrate
  Common cal_common;
  std::string cal_out, cal_report;
  std::size_t cal_scenes = 4;
  double cal_duration = 60.0;
  auto* calibrate = app.add_subcommand("calibrate", "Fit detector thresholds on synthetic scenes");
  AddCommon(calibrate, cal_common);
  calibrate->add_option("--scenes-per-level", cal_scenes, "Scenes at each of low, medium, high")->capture_default_str();
  calibrate->add_option("--duration", cal_duration, "Scene length in seconds")->capture_default_str();
  calibrate->add_option("--out", cal_out, "Write the calibrated config here");
  calibrate->add_option("--report", cal_report, "Calibration JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*synth) {
      const wg::PipelineConfig cfg = LoadPipeline(synth_common);
      wg::SceneSpec spec;
      spec.duration_s = synth_duration;
      spec.sample_rate = cfg.sample_rate;
      spec.wind_level = wg::ParseWindLevel(synth_level);
      spec.seed = cfg.seed;
      spec.framing = cfg.framing;
      if (!synth_speech.empty()) {
        spec.speech_kind = wg::SpeechKind::kWavFile;
        spec.wav_path = synth_speech;
      }
      if (spec.wind_level != wg::WindLevel::kNone) {
        for (const auto& g : synth_gusts) spec.gusts.push_back(ParseGust(g, synth_ramp));
        if (synth_gusts.empty()) spec.gusts.push_back(wg::SteadyGust(synth_duration));
      }
      const wg::LabeledScene scene = wg::MixScene(spec);
      wg::WriteWav(scene.audio, synth_out, Format(synth_pcm16));
      if (!synth_clean.empty()) wg::WriteWav(scene.clean, synth_clean, Format(synth_pcm16));
      if (!synth_labels.empty()) WriteText(synth_labels, FormatLabels(scene.chunk_labels));
      nlohmann::json summary = {{"samples", scene.audio.num_samples()},
                                {"chunks", scene.chunk_labels.size()},
                                {"wind_level", wg::WindLevelName(scene.wind_level)},
                                {"output_gain", scene.output_gain},
                                {"seed", scene.seed}};
      summary["achieved_ratio_db"] = scene.achieved_ratio_db
                                         ? nlohmann::json(*scene.achieved_ratio_db)
                                         : nlohmann::json(nullptr);
      WriteJson("-", summary);
    } else if (*detect) {
      const wg::PipelineConfig cfg = LoadPipeline(detect_common);
      const wg::MultiChannelAudio audio = ReadInput(detect_in, cfg);
      const auto trace = wg::DetectBatch(audio, cfg.ResolvedDetector(), cfg.ResolvedFraming());
      if (!detect_csv.empty() || detect_labels.empty()) WriteText(detect_csv, DecisionCsv(trace));
      if (!detect_labels.empty()) {
        wg::DetectionReport report = wg::DetectionMetrics(trace, ReadLabels(detect_labels));
        WriteJson(detect_report, wg::ToJson(report));
      }
    } else if (*suppress) {
      const wg::PipelineConfig cfg = LoadPipeline(suppress_common);
      const wg::NnModel model = LoadCheckedModel(ModelPath(suppress_model, cfg), cfg);
      const wg::MultiChannelAudio audio = ReadInput(suppress_in, cfg);
      wg::WriteWav(wg::Suppress(audio, model), suppress_out, Format(suppress_pcm16));
    } else if (*train) {
      const wg::PipelineConfig cfg = LoadPipeline(train_common);
      const wg::Framing framing = cfg.ResolvedFraming();
      const std::string out = ModelPath(train_out, cfg);
      std::vector<wg::TrainingPair> pairs;
      if (train_noisy.size() != train_clean.size()) {
        throw wg::ConfigError("every --noisy needs a matching --clean");
      }
      if (train_noisy.empty()) {
        for (wg::SceneSpec spec : wg::TrainingCorpus(60.0 * train_minutes, train_scene_s, cfg.seed)) {
          spec.sample_rate = cfg.sample_rate;
          spec.framing = cfg.framing;
          const wg::LabeledScene scene = wg::MixScene(spec);
          pairs.push_back(wg::MakeTrainingPair(scene.audio, scene.clean, framing));
        }
      } else {
        for (std::size_t i = 0; i < train_noisy.size(); ++i) {
          pairs.push_back(wg::MakeTrainingPair(ReadInput(train_noisy[i], cfg),
                                               ReadInput(train_clean[i], cfg), framing));
        }
      }
      const wg::SuppressorTrainingResult result = wg::TrainSuppressor(
          pairs, cfg.context, cfg.region, cfg.training, cfg.magnitude_rule);
      wg::SaveModel(result.model, out);
      WriteJson(train_report, {{"model", out},
                               {"frames", result.num_samples},
                               {"iterations", result.iterations},
                               {"initial_loss", result.initial_loss},
                               {"final_loss", result.final_loss}});
    } else if (*eval) {
      const wg::PipelineConfig cfg = LoadPipeline(eval_common);
      const wg::Framing framing = cfg.ResolvedFraming();
      const wg::DetectorConfig detector = cfg.ResolvedDetector();
      std::optional<wg::NnModel> model;
      if (!eval_model.empty()) model = LoadCheckedModel(eval_model, cfg);
      const wg::WindLevel level = wg::ParseWindLevel(eval_level);
      std::vector<wg::DetectionReport> reports;
      nlohmann::json recon = nlohmann::json::array();
      wg::ReconReport mean;
      for (wg::SceneSpec spec : wg::TransitionCorpus(level, eval_scenes, eval_duration, cfg.seed)) {
        spec.sample_rate = cfg.sample_rate;
        spec.framing = cfg.framing;
        const wg::LabeledScene scene = wg::MixScene(spec);
        reports.push_back(wg::DetectionMetrics(wg::DetectBatch(scene.audio, detector, framing),
                                               scene.chunk_labels));
        if (model) {
          const wg::ReconReport r = wg::EvaluateReconstruction(
              scene.clean, scene.audio, wg::Suppress(scene.audio, *model), framing,
              model->region.cutoff_hz);
          recon.push_back(wg::ToJson(r));
          mean.inband_noisy_db += r.inband_noisy_db / static_cast<double>(eval_scenes);
          mean.inband_recon_db += r.inband_recon_db / static_cast<double>(eval_scenes);
          mean.fullband_noisy_db += r.fullband_noisy_db / static_cast<double>(eval_scenes);
          mean.fullband_recon_db += r.fullband_recon_db / static_cast<double>(eval_scenes);
          mean.segsnr_noisy_db += r.segsnr_noisy_db / static_cast<double>(eval_scenes);
          mean.segsnr_recon_db += r.segsnr_recon_db / static_cast<double>(eval_scenes);
        }
      }
      nlohmann::json report = {{"wind_level", wg::WindLevelName(level)},
                               {"scenes", eval_scenes},
                               {"detection", wg::ToJson(wg::MergeReports(reports))}};
      report["detection"].erase("trace");
      report["detection"].erase("truth");
      if (model) {
        report["reconstruction_mean"] = wg::ToJson(mean);
        report["reconstruction"] = recon;
      }
      WriteJson(eval_report, report);
    } else if (*stream) {
      const wg::PipelineConfig cfg = LoadPipeline(stream_common);
      std::optional<wg::NnModel> model;
      if (!stream_model.empty()) model = LoadCheckedModel(stream_model, cfg);
      if (!stream_out.empty() && !model) throw wg::ConfigError("--out needs --model");
      const wg::MultiChannelAudio audio = ReadInput(stream_in, cfg);
      const wg::Framing framing = cfg.ResolvedFraming();
      const wg::StreamResult result = wg::RunStream(audio, cfg.ResolvedDetector(), framing,
                                                    model ? &*model : nullptr);
      if (!stream_csv.empty()) WriteText(stream_csv, DecisionCsv(result.decisions));
      if (!stream_out.empty()) wg::WriteWav(*result.reconstructed, stream_out, Format(stream_pcm16));
      const double chunk_ms = 1000.0 * framing.chunk_len() / framing.sample_rate;
      WriteJson(stream_report,
                {{"chunks", result.decisions.size()},
                 {"frames", result.num_frames},
                 {"chunk_ms", chunk_ms},
                 {"median_chunk_wall_ms", Median(result.chunk_wall_ms)},
                 {"max_chunk_wall_ms",
                  result.chunk_wall_ms.empty()
                      ? 0.0
                      : *std::max_element(result.chunk_wall_ms.begin(), result.chunk_wall_ms.end())},
                 {"suppression", model.has_value()}});
    } else if (*calibrate) {
      wg::PipelineConfig cfg = LoadPipeline(cal_common);
      const wg::Framing framing = cfg.ResolvedFraming();
      const wg::DetectorConfig base = cfg.ResolvedDetector();
      std::vector<wg::ScoredScene> corpus;
      for (wg::WindLevel level : {wg::WindLevel::kLow, wg::WindLevel::kMedium, wg::WindLevel::kHigh}) {
        for (wg::SceneSpec spec : wg::TransitionCorpus(level, cal_scenes, cal_duration, cfg.seed)) {
          spec.sample_rate = cfg.sample_rate;
          spec.framing = cfg.framing;
          corpus.push_back(wg::ScoreScene(wg::MixScene(spec), base, framing));
        }
      }
      const wg::CalibrationPoint point = wg::Calibrate(DefaultGrid(), corpus, base);
      cfg.detector = wg::ApplyCalibration(cfg.detector, point);
      if (!cal_out.empty()) WriteText(cal_out, wg::FormatConfig(cfg));
      WriteJson(cal_report, wg::ToJson(point));
    }
  } catch (const wg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const wg::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
