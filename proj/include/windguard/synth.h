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

// Deterministic two-channel scenes: a voiced-speech proxy that reaches both
// microphones with a small delay (coherent) plus independent low-pass noise
// per microphone (incoherent wind), gated by gust envelopes.

#ifndef WINDGUARD_SYNTH_H_
#define WINDGUARD_SYNTH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "windguard/audio.h"
#include "windguard/framing.h"

namespace windguard {

enum class WindLevel { kNone, kLow, kMedium, kHigh };

// Wind-to-speech power ratio in dB: -inf, -5, 0, +10. These are calibration
// constants of the synthetic rig.
double WindToSpeechDb(WindLevel level);
const char* WindLevelName(WindLevel level);
// Throws ConfigError for unknown names.
WindLevel ParseWindLevel(const std::string& name);

struct Gust {
  double start_s = 0.0;
  double end_s = 0.0;
  double ramp_ms = 100.0;

  bool operator==(const Gust&) const = default;
};

enum class SpeechKind { kHarmonicProxy, kWavFile };

struct SceneSpec {
  double duration_s = 10.0;
  int sample_rate = kDefaultSampleRate;
  WindLevel wind_level = WindLevel::kMedium;
  std::vector<Gust> gusts;
  SpeechKind speech_kind = SpeechKind::kHarmonicProxy;
  std::string wav_path;
  std::uint64_t seed = 1;
  // Speech delay of the second microphone, in samples.
  int inter_channel_delay = 4;
  // Only chunk_ms is used, to derive the label grid.
  FramingConfig framing;

  // Throws ConfigError on a non-positive duration or gusts outside it.
  void Validate() const;
};

struct LabeledScene {
  MultiChannelAudio audio;  // 2 channels
  MultiChannelAudio clean;  // 1 channel: speech as seen by microphone 1
  // Wind truth per chunk: the gust envelope exceeds half amplitude somewhere
  // in the chunk.
  std::vector<bool> chunk_labels;
  // Gust envelope per sample, in [0, 1].
  std::vector<double> envelope;
  // Measured wind/speech power ratio over samples where the envelope exceeds
  // one half; nullopt when there is no such span or no wind.
  std::optional<double> achieved_ratio_db;
  // Attenuation applied to keep the mix at or below 0 dBFS.
  double output_gain = 1.0;
  WindLevel wind_level = WindLevel::kNone;
  std::uint64_t seed = 0;
};

// Independent low-frequency noise for each channel: white Gaussian noise
// through a cascade of first-order low-pass sections, normalised to unit RMS.
MultiChannelAudio GenerateWind(double duration_s, int sample_rate,
                               std::uint64_t seed, std::size_t num_channels = 2);

// Harmonic tone complex with a drifting 120-220 Hz fundamental, harmonics up
// to 4 kHz and a 4 Hz syllabic amplitude modulation, peak-normalised to
// -6 dBFS. Throws ConfigError for a non-positive duration. `f0_track`, when
// given, receives the fundamental in Hz at every sample.
std::vector<double> GenerateSpeechProxy(double duration_s, int sample_rate,
                                        std::uint64_t seed,
                                        std::vector<double>* f0_track = nullptr);

// Per-sample gust envelope, the maximum over gusts of a trapezoid with linear
// ramps of ramp_ms inside [start, end].
std::vector<double> GustEnvelope(const std::vector<Gust>& gusts,
                                 std::size_t num_samples, int sample_rate);

LabeledScene MixScene(const SceneSpec& spec);

// A scene whose wind blows from start to end.
Gust SteadyGust(double duration_s);

// Scenes with a single wind transition at a uniform time in the middle third:
// even indices go calm to windy, odd indices windy to calm. Level kNone gives
// windless scenes.
std::vector<SceneSpec> TransitionCorpus(WindLevel level, std::size_t count,
                                        double duration_s, std::uint64_t seed,
                                        double ramp_ms = 300.0);

// Scenes of `scene_s` cycling through steady low, medium and high wind and
// one windless scene, at least `total_s` long in total.
std::vector<SceneSpec> TrainingCorpus(double total_s, double scene_s, std::uint64_t seed);

}  // namespace windguard

#endif  // WINDGUARD_SYNTH_H_
