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

#include "windguard/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "windguard/errors.h"
#include "windguard/wav.h"

namespace windguard {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wind shaping: two first-order sections at 100 Hz.
constexpr int kWindLowpassStages = 2;
constexpr double kWindCornerHz = 100.0;

constexpr double kF0CenterHz = 170.0;
constexpr double kF0SwingHz = 50.0;
constexpr double kHarmonicCeilingHz = 4000.0;
constexpr double kHarmonicTaperHz = 400.0;
constexpr double kSyllableRateHz = 4.0;
constexpr double kSpeechPeak = 0.50118723362727224;  // -6 dBFS

enum class Stream : std::uint64_t { kWind = 1, kSpeech = 2, kCorpus = 3 };

std::mt19937_64 MakeRng(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

std::size_t NumSamples(double duration_s, int sample_rate) {
  if (!(duration_s > 0.0)) {
    throw ConfigError("duration must be positive");
  }
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

}  // namespace

double WindToSpeechDb(WindLevel level) {
  switch (level) {
    case WindLevel::kNone:
      return -std::numeric_limits<double>::infinity();
    case WindLevel::kLow:
      return -5.0;
    case WindLevel::kMedium:
      return 0.0;
    case WindLevel::kHigh:
      return 10.0;
  }
  return -std::numeric_limits<double>::infinity();
}

const char* WindLevelName(WindLevel level) {
  switch (level) {
    case WindLevel::kNone:
      return "none";
    case WindLevel::kLow:
      return "low";
    case WindLevel::kMedium:
      return "medium";
    case WindLevel::kHigh:
      return "high";
  }
  return "none";
}

WindLevel ParseWindLevel(const std::string& name) {
  for (WindLevel level : {WindLevel::kNone, WindLevel::kLow, WindLevel::kMedium,
                          WindLevel::kHigh}) {
    if (name == WindLevelName(level)) return level;
  }
  throw ConfigError("unknown wind level '" + name +
                    "' (expected none, low, medium or high)");
}

void SceneSpec::Validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("scene duration must be positive");
  if (sample_rate <= 0) throw ConfigError("scene sample rate must be positive");
  if (inter_channel_delay < 0) throw ConfigError("inter-channel delay must be >= 0");
  for (const Gust& g : gusts) {
    if (g.start_s < 0.0 || g.end_s > duration_s + 1e-9 || g.end_s <= g.start_s ||
        g.ramp_ms < 0.0) {
      throw ConfigError("gust [" + std::to_string(g.start_s) + ", " +
                        std::to_string(g.end_s) + "] s lies outside the scene");
    }
  }
  if (speech_kind == SpeechKind::kWavFile && wav_path.empty()) {
    throw ConfigError("speech_kind = wav_file needs a path");
  }
}

MultiChannelAudio GenerateWind(double duration_s, int sample_rate,
                               std::uint64_t seed, std::size_t num_channels) {
  const std::size_t n = NumSamples(duration_s, sample_rate);
  MultiChannelAudio out(num_channels, n, sample_rate);
  const double coeff = 1.0 - std::exp(-kTwoPi * kWindCornerHz / sample_rate);
  for (std::size_t c = 0; c < num_channels; ++c) {
    std::mt19937_64 rng = MakeRng(seed, Stream::kWind, c);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> state(kWindLowpassStages, 0.0);
    auto& ch = out.channels[c];
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = gauss(rng);
      for (double& s : state) {
        s += coeff * (v - s);
        v = s;
      }
      ch[i] = v;
      energy += v * v;
    }
    const double rms = std::sqrt(energy / static_cast<double>(n));
    if (rms > 0.0) {
      for (double& v : ch) v /= rms;
    }
  }
  return out;
}

std::vector<double> GenerateSpeechProxy(double duration_s, int sample_rate,
                                        std::uint64_t seed,
                                        std::vector<double>* f0_track) {
  const std::size_t n = NumSamples(duration_s, sample_rate);
  if (f0_track != nullptr) f0_track->assign(n, 0.0);
  std::mt19937_64 rng = MakeRng(seed, Stream::kSpeech, 0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const double drift_phase_a = phase(rng);
  const double drift_phase_b = phase(rng);
  const double syllable_phase = phase(rng);
  const int max_harmonic =
      static_cast<int>(kHarmonicCeilingHz / (kF0CenterHz - kF0SwingHz));
  std::vector<double> harmonic_phase(static_cast<std::size_t>(max_harmonic));
  for (double& p : harmonic_phase) p = phase(rng);

  std::vector<double> out(n);
  double f0_phase = 0.0;  // integral of 2 pi F0
  const double dt = 1.0 / sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double drift = 0.6 * std::sin(kTwoPi * 0.23 * t + drift_phase_a) +
                         0.4 * std::sin(kTwoPi * 0.61 * t + drift_phase_b);
    const double f0 = kF0CenterHz + kF0SwingHz * drift;
    if (f0_track != nullptr) (*f0_track)[i] = f0;
    double v = 0.0;
    for (int k = 1; k <= max_harmonic; ++k) {
      const double hz = k * f0;
      if (hz >= kHarmonicCeilingHz) break;
      double gain = 1.0;
      const double into_taper = hz - (kHarmonicCeilingHz - kHarmonicTaperHz);
      if (into_taper > 0.0) {
        const double c = std::cos(0.5 * std::numbers::pi * into_taper / kHarmonicTaperHz);
        gain = c * c;
      }
      v += gain * std::sin(k * f0_phase + harmonic_phase[static_cast<std::size_t>(k - 1)]);
    }
    const double syllable =
        0.55 + 0.45 * std::sin(kTwoPi * kSyllableRateHz * t + syllable_phase);
    out[i] = syllable * v;
    f0_phase = std::fmod(f0_phase + kTwoPi * f0 * dt, kTwoPi);
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out) v *= kSpeechPeak / peak;
  }
  return out;
}

std::vector<double> GustEnvelope(const std::vector<Gust>& gusts,
                                 std::size_t num_samples, int sample_rate) {
  std::vector<double> env(num_samples, 0.0);
  for (const Gust& g : gusts) {
    const double ramp_s = g.ramp_ms / 1000.0;
    const double half = 0.5 * (g.end_s - g.start_s);
    const double effective_ramp = std::min(ramp_s, half);
    const auto first = static_cast<std::size_t>(
        std::max(0.0, std::floor(g.start_s * sample_rate)));
    const auto last = std::min(
        num_samples, static_cast<std::size_t>(std::ceil(g.end_s * sample_rate)));
    for (std::size_t i = first; i < last; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      if (t < g.start_s || t >= g.end_s) continue;
      double v = 1.0;
      if (effective_ramp > 0.0) {
        v = std::min({1.0, (t - g.start_s) / effective_ramp,
                      (g.end_s - t) / effective_ramp});
      }
      env[i] = std::max(env[i], v);
    }
  }
  return env;
}

Gust SteadyGust(double duration_s) { return Gust{0.0, duration_s, 0.0}; }

LabeledScene MixScene(const SceneSpec& spec) {
  spec.Validate();
  const std::size_t n = NumSamples(spec.duration_s, spec.sample_rate);
  LabeledScene scene;
  scene.wind_level = spec.wind_level;
  scene.seed = spec.seed;

  std::vector<double> speech;
  if (spec.speech_kind == SpeechKind::kHarmonicProxy) {
    speech = GenerateSpeechProxy(spec.duration_s, spec.sample_rate, spec.seed);
  } else {
    const MultiChannelAudio wav = ReadWav(spec.wav_path);
    if (wav.sample_rate != spec.sample_rate) {
      throw DataError("speech file " + spec.wav_path + " is at " +
                      std::to_string(wav.sample_rate) + " Hz, scene needs " +
                      std::to_string(spec.sample_rate) + " Hz");
    }
    speech = wav.channels.front();
  }
  speech.resize(n, 0.0);

  const auto delay = static_cast<std::size_t>(spec.inter_channel_delay);
  std::vector<std::vector<double>> speech_at_mic(2, std::vector<double>(n, 0.0));
  speech_at_mic[0] = speech;
  for (std::size_t i = delay; i < n; ++i) speech_at_mic[1][i] = speech[i - delay];

  const bool windy = spec.wind_level != WindLevel::kNone;
  scene.envelope = windy ? GustEnvelope(spec.gusts, n, spec.sample_rate)
                         : std::vector<double>(n, 0.0);

  // Wind gain that realises the requested ratio over the active span.
  double wind_gain = 0.0;
  double speech_power = 0.0;
  double wind_power = 0.0;
  std::size_t active = 0;
  MultiChannelAudio wind;
  if (windy) {
    wind = GenerateWind(spec.duration_s, spec.sample_rate, spec.seed, 2);
    for (std::size_t i = 0; i < n; ++i) {
      if (scene.envelope[i] <= 0.5) continue;
      ++active;
      for (std::size_t c = 0; c < 2; ++c) {
        speech_power += speech_at_mic[c][i] * speech_at_mic[c][i];
        const double w = scene.envelope[i] * wind.channels[c][i];
        wind_power += w * w;
      }
    }
    if (active > 0 && wind_power > 0.0 && speech_power > 0.0) {
      const double ratio = std::pow(10.0, WindToSpeechDb(spec.wind_level) / 10.0);
      wind_gain = std::sqrt(ratio * speech_power / wind_power);
    }
  }

  MultiChannelAudio mix(2, n, spec.sample_rate);
  double peak = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = speech_at_mic[c][i];
      if (wind_gain > 0.0) v += wind_gain * scene.envelope[i] * wind.channels[c][i];
      mix.channels[c][i] = v;
      peak = std::max(peak, std::abs(v));
    }
  }
  scene.output_gain = peak > 1.0 ? 1.0 / peak : 1.0;
  if (scene.output_gain != 1.0) {
    for (auto& ch : mix.channels) {
      for (double& v : ch) v *= scene.output_gain;
    }
  }
  scene.audio = std::move(mix);
  scene.clean = MultiChannelAudio(1, n, spec.sample_rate);
  for (std::size_t i = 0; i < n; ++i) {
    scene.clean.channels[0][i] = speech_at_mic[0][i] * scene.output_gain;
  }

  if (wind_gain > 0.0) {
    // Measure the ratio on the mixed components as written.
    double sp = 0.0;
    double wp = 0.0;
    const double g = scene.output_gain;
    for (std::size_t i = 0; i < n; ++i) {
      if (scene.envelope[i] <= 0.5) continue;
      for (std::size_t c = 0; c < 2; ++c) {
        const double s = g * speech_at_mic[c][i];
        const double w = g * wind_gain * scene.envelope[i] * wind.channels[c][i];
        sp += s * s;
        wp += w * w;
      }
    }
    scene.achieved_ratio_db = 10.0 * std::log10(wp / sp);
  }

  const auto chunk_len = static_cast<std::size_t>(
      std::llround(spec.framing.chunk_ms * spec.sample_rate / 1000.0));
  const std::size_t chunks = chunk_len == 0 ? 0 : (n + chunk_len - 1) / chunk_len;
  scene.chunk_labels.assign(chunks, false);
  if (wind_gain > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (scene.envelope[i] > 0.5) scene.chunk_labels[i / chunk_len] = true;
    }
  }
  return scene;
}

std::vector<SceneSpec> TransitionCorpus(WindLevel level, std::size_t count,
                                        double duration_s, std::uint64_t seed,
                                        double ramp_ms) {
  if (!(duration_s > 0.0)) throw ConfigError("scene duration must be positive");
  std::vector<SceneSpec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng = MakeRng(seed, Stream::kCorpus, i);
    SceneSpec spec;
    spec.duration_s = duration_s;
    spec.wind_level = level;
    spec.seed = rng();
    const double at =
        std::uniform_real_distribution<double>(duration_s / 3.0, 2.0 * duration_s / 3.0)(rng);
    if (level != WindLevel::kNone) {
      spec.gusts = {i % 2 == 0 ? Gust{at, duration_s, ramp_ms} : Gust{0.0, at, ramp_ms}};
    }
    out.push_back(spec);
  }
  return out;
}

std::vector<SceneSpec> TrainingCorpus(double total_s, double scene_s, std::uint64_t seed) {
  if (!(scene_s > 0.0) || !(total_s > 0.0)) {
    throw ConfigError("training corpus durations must be positive");
  }
  constexpr WindLevel kCycle[] = {WindLevel::kLow, WindLevel::kMedium, WindLevel::kHigh,
                                  WindLevel::kNone};
  const auto count = static_cast<std::size_t>(std::ceil(total_s / scene_s - 1e-9));
  std::vector<SceneSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng = MakeRng(seed, Stream::kCorpus, i);
    SceneSpec spec;
    spec.duration_s = scene_s;
    spec.wind_level = kCycle[i % 4];
    spec.seed = rng();
    if (spec.wind_level != WindLevel::kNone) spec.gusts = {SteadyGust(scene_s)};
    out.push_back(spec);
  }
  return out;
}

}  // namespace windguard
