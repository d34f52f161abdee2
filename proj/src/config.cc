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


#include "windguard/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "windguard/errors.h"

namespace windguard {
namespace {

namespace pt = boost::property_tree;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& raw) {
  const std::string v = Trim(raw);
  T out{};
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& raw) {
  const std::string v = Trim(raw);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

using Setter = std::function<void(PipelineConfig&, const std::string& key,
                                  const std::string& value)>;

template <typename T, typename Field>
Setter Number(Field field) {
  return [field](PipelineConfig& c, const std::string& k, const std::string& v) {
    field(c) = ParseNumber<T>(k, v);
  };
}

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> table = {
      {"framing.sample_rate", Number<int>([](PipelineConfig& c) -> int& { return c.sample_rate; })},
      {"framing.frame_ms", Number<double>([](PipelineConfig& c) -> double& { return c.framing.frame_ms; })},
      {"framing.hop_ms", Number<double>([](PipelineConfig& c) -> double& { return c.framing.hop_ms; })},
      {"framing.chunk_ms", Number<double>([](PipelineConfig& c) -> double& { return c.framing.chunk_ms; })},
      {"framing.fft_size", Number<int>([](PipelineConfig& c) -> int& { return c.framing.fft_size; })},
      {"ssc.mu1", Number<int>([](PipelineConfig& c) -> int& { return c.detector.ssc.mu1; })},
      {"ssc.mu2", Number<int>([](PipelineConfig& c) -> int& { return c.detector.ssc.mu2; })},
      {"ssc.smooth_ms", Number<double>([](PipelineConfig& c) -> double& { return c.detector.ssc.smooth_ms; })},
      {"ssc.transform_sigma", Number<double>([](PipelineConfig& c) -> double& { return c.detector.ssc.transform_sigma; })},
      {"ssc.threshold", Number<double>([](PipelineConfig& c) -> double& { return c.detector.ssc.ssc_threshold; })},
      {"coherence.alpha", Number<double>([](PipelineConfig& c) -> double& { return c.detector.coherence.alpha_s; })},
      {"coherence.threshold", Number<double>([](PipelineConfig& c) -> double& { return c.detector.coherence.mc_threshold; })},
      {"coherence.band_low_hz", Number<double>([](PipelineConfig& c) -> double& { return c.detector.coherence.band_low_hz; })},
      {"coherence.band_high_hz", Number<double>([](PipelineConfig& c) -> double& { return c.detector.coherence.band_high_hz; })},
      {"coherence.smooth_ms", Number<double>([](PipelineConfig& c) -> double& { return c.detector.coherence.smooth_ms; })},
      {"detector.hysteresis_chunks", Number<int>([](PipelineConfig& c) -> int& { return c.detector.hysteresis_chunks; })},
      {"detector.channel_a", Number<int>([](PipelineConfig& c) -> int& { return c.detector.coherence_channel_a; })},
      {"detector.channel_b", Number<int>([](PipelineConfig& c) -> int& { return c.detector.coherence_channel_b; })},
      {"region.cutoff_hz", Number<double>([](PipelineConfig& c) -> double& { return c.region.cutoff_hz; })},
      {"context.radius", Number<int>([](PipelineConfig& c) -> int& { return c.context.radius; })},
      {"context.channels", Number<int>([](PipelineConfig& c) -> int& { return c.context.channels; })},
      {"training.hidden", Number<std::size_t>([](PipelineConfig& c) -> std::size_t& { return c.training.hidden; })},
      {"training.max_iterations", Number<int>([](PipelineConfig& c) -> int& { return c.training.max_iterations; })},
      {"training.tolerance", Number<double>([](PipelineConfig& c) -> double& { return c.training.tolerance; })},
      {"training.restart_interval", Number<int>([](PipelineConfig& c) -> int& { return c.training.restart_interval; })},
      {"training.learning_rate", Number<double>([](PipelineConfig& c) -> double& { return c.training.learning_rate; })},
      {"training.min_scale", Number<double>([](PipelineConfig& c) -> double& { return c.training.min_scale; })},
      {"training.optimizer",
       [](PipelineConfig& c, const std::string& k, const std::string& raw) {
         const std::string v = Trim(raw);
         if (v == "cg") {
           c.training.optimizer = Optimizer::kConjugateGradient;
         } else if (v == "gd") {
           c.training.optimizer = Optimizer::kGradientDescent;
         } else {
           throw ConfigError("config key '" + k + "': expected cg or gd, got '" + v + "'");
         }
       }},
      {"training.literal_exp",
       [](PipelineConfig& c, const std::string& k, const std::string& v) {
         c.magnitude_rule = ParseBool(k, v) ? MagnitudeRule::kLiteralExp
                                            : MagnitudeRule::kHalfLogPower;
       }},
      {"paths.model",
       [](PipelineConfig& c, const std::string&, const std::string& v) { c.paths.model = Trim(v); }},
      {"paths.output_dir",
       [](PipelineConfig& c, const std::string&, const std::string& v) {
         c.paths.output_dir = Trim(v);
       }},
      {"run.seed", Number<std::uint64_t>([](PipelineConfig& c) -> std::uint64_t& { return c.seed; })},
  };
  return table;
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Framing PipelineConfig::ResolvedFraming() const {
  return ResolveFraming(framing, sample_rate);
}

DetectorConfig PipelineConfig::ResolvedDetector() const {
  return ResolveDetectorConfig(detector, ResolvedFraming());
}

void PipelineConfig::Validate() const {
  const Framing f = ResolvedFraming();
  ResolveDetectorConfig(detector, f);
  region.NumBins(f);
  context.Validate();
  if (training.hidden < 1) throw ConfigError("training.hidden must be >= 1");
  if (training.max_iterations < 0) throw ConfigError("training.max_iterations must be >= 0");
  if (training.restart_interval < 1) throw ConfigError("training.restart_interval must be >= 1");
  if (!(training.tolerance >= 0.0)) throw ConfigError("training.tolerance must be >= 0");
  if (!(training.learning_rate > 0.0)) throw ConfigError("training.learning_rate must be positive");
  if (!(training.min_scale > 0.0)) throw ConfigError("training.min_scale must be positive");
}

PipelineConfig ParseConfig(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  PipelineConfig config;
  const auto& setters = Setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config key '" + section + "' is outside any section");
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const auto it = setters.find(name);
      if (it == setters.end()) throw ConfigError("unknown config key '" + name + "'");
      it->second(config, name, value.data());
    }
  }
  config.Validate();
  return config;
}

PipelineConfig LoadConfig(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return ParseConfig(buf.str());
}

std::string FormatConfig(const PipelineConfig& c) {
  std::ostringstream o;
  o << "[framing]\n"
    << "sample_rate = " << c.sample_rate << "\n"
    << "frame_ms = " << Num(c.framing.frame_ms) << "\n"
    << "hop_ms = " << Num(c.framing.hop_ms) << "\n"
    << "chunk_ms = " << Num(c.framing.chunk_ms) << "\n"
    << "fft_size = " << c.framing.fft_size << "\n\n"
    << "[ssc]\n"
    << "mu1 = " << c.detector.ssc.mu1 << "\n"
    << "mu2 = " << c.detector.ssc.mu2 << "\n"
    << "smooth_ms = " << Num(c.detector.ssc.smooth_ms) << "\n"
    << "transform_sigma = " << Num(c.detector.ssc.transform_sigma) << "\n"
    << "threshold = " << Num(c.detector.ssc.ssc_threshold) << "\n\n"
    << "[coherence]\n"
    << "alpha = " << Num(c.detector.coherence.alpha_s) << "\n"
    << "threshold = " << Num(c.detector.coherence.mc_threshold) << "\n"
    << "band_low_hz = " << Num(c.detector.coherence.band_low_hz) << "\n"
    << "band_high_hz = " << Num(c.detector.coherence.band_high_hz) << "\n"
    << "smooth_ms = " << Num(c.detector.coherence.smooth_ms) << "\n\n"
    << "[detector]\n"
    << "hysteresis_chunks = " << c.detector.hysteresis_chunks << "\n"
    << "channel_a = " << c.detector.coherence_channel_a << "\n"
    << "channel_b = " << c.detector.coherence_channel_b << "\n\n"
    << "[region]\n"
    << "cutoff_hz = " << Num(c.region.cutoff_hz) << "\n\n"
    << "[context]\n"
    << "radius = " << c.context.radius << "\n"
    << "channels = " << c.context.channels << "\n\n"
    << "[training]\n"
    << "hidden = " << c.training.hidden << "\n"
    << "max_iterations = " << c.training.max_iterations << "\n"
    << "tolerance = " << Num(c.training.tolerance) << "\n"
    << "restart_interval = " << c.training.restart_interval << "\n"
    << "optimizer = "
    << (c.training.optimizer == Optimizer::kConjugateGradient ? "cg" : "gd") << "\n"
    << "learning_rate = " << Num(c.training.learning_rate) << "\n"
    << "min_scale = " << Num(c.training.min_scale) << "\n"
    << "literal_exp = "
    << (c.magnitude_rule == MagnitudeRule::kLiteralExp ? "true" : "false") << "\n\n";
  if (!c.paths.model.empty() || !c.paths.output_dir.empty()) {
    o << "[paths]\n";
    if (!c.paths.model.empty()) o << "model = " << c.paths.model << "\n";
    if (!c.paths.output_dir.empty()) o << "output_dir = " << c.paths.output_dir << "\n";
    o << "\n";
  }
  o << "[run]\n"
    << "seed = " << c.seed << "\n";
  return o.str();
}

void CheckModelMatchesConfig(const NnModel& model, const PipelineConfig& config) {
  if (!(model.framing == config.ResolvedFraming())) {
    throw ConfigError("model was trained with a different framing than the config");
  }
  if (!(model.context == config.context)) {
    throw ConfigError("model context (radius " + std::to_string(model.context.radius) +
                      ", channels " + std::to_string(model.context.channels) +
                      ") differs from the config");
  }
  if (!(model.region == config.region)) {
    throw ConfigError("model attentive cutoff " + std::to_string(model.region.cutoff_hz) +
                      " Hz differs from the config");
  }
}

}  // namespace windguard
