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

// Attentive wind suppression.
//
// A shallow network maps a context window of multi-channel log-power frames
// to the clean log-power of the low-frequency bins only (the attentive
// region). Those bins are rebuilt with the predicted magnitude and the noisy
// phase of the reference channel; every other bin is copied through untouched.

#ifndef WINDGUARD_SUPPRESSOR_H_
#define WINDGUARD_SUPPRESSOR_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "windguard/audio.h"
#include "windguard/framing.h"
#include "windguard/grid.h"
#include "windguard/nn.h"
#include "windguard/stft.h"

namespace windguard {

struct AttentiveRegion {
  double cutoff_hz = 500.0;

  // Bins whose centre frequency lies below the cutoff: 0 .. NumBins() - 1.
  // Throws ConfigError if that set is empty or reaches Nyquist.
  int NumBins(const Framing& framing) const;
  bool Contains(int bin, const Framing& framing) const;

  bool operator==(const AttentiveRegion&) const = default;
};

struct ContextSpec {
  int radius = 3;
  int channels = 2;

  std::size_t InputDim(std::size_t num_bins) const {
    return static_cast<std::size_t>(channels) *
           static_cast<std::size_t>(2 * radius + 1) * num_bins;
  }
  void Validate() const;

  bool operator==(const ContextSpec&) const = default;
};

// How a predicted log-power value Y becomes a magnitude.
enum class MagnitudeRule {
  // exp(Y / 2): Y is a natural-log power, so the round trip is exact.
  kHalfLogPower = 0,
  // exp(Y): treats Y as a log magnitude.
  kLiteralExp = 1,
};

double MagnitudeFromLogPower(double y, MagnitudeRule rule);

// Everything needed to run the suppressor on new audio.
struct NnModel {
  ShallowNetwork network;
  Framing framing;
  ContextSpec context;
  AttentiveRegion region;
  MagnitudeRule magnitude_rule = MagnitudeRule::kHalfLogPower;

  // Throws DataError when the network shape disagrees with the layout.
  void Validate() const;
  bool operator==(const NnModel&) const = default;
};

// Concatenation, channel by channel, of frames t - r .. t + r of each
// log-power grid; frames outside the grid repeat the nearest edge frame.
std::vector<double> BuildContext(std::span<const RealGrid> log_power,
                                 std::size_t t, const ContextSpec& spec);
void BuildContextInto(std::span<const RealGrid> log_power, std::size_t t,
                      const ContextSpec& spec, std::span<double> out);

// Network forward pass for one context vector. Throws DataError on a length
// mismatch.
Eigen::VectorXd NnForward(const NnModel& model, std::span<const double> input);

// Predicted attentive log-power for every frame of `log_power`.
RealGrid PredictAttentive(const NnModel& model, std::span<const RealGrid> log_power);

// Rebuilds one frame: attentive bins get magnitude from `prediction`, capped
// at the reference magnitude, and the phase of `reference`; other bins are
// copied from `reference` unchanged.
void ReconstructFrame(std::span<const double> prediction,
                      std::span<const std::complex<double>> reference,
                      MagnitudeRule rule, std::span<std::complex<double>> out);

// Single-channel grid built from the noisy grid's reference (first) channel.
// Throws DataError when the grid's framing or channel count does not match
// the model.
StftGrid AttentiveReconstruct(const NnModel& model, const StftGrid& noisy);

// Full offline pipeline: analysis, prediction, reconstruction and
// overlap-add. Output has one channel and the input's length.
MultiChannelAudio Suppress(const MultiChannelAudio& audio, const NnModel& model);

struct TrainingPair {
  StftGrid noisy;  // context.channels channels
  StftGrid clean;  // 1 channel, frame-synchronous with `noisy`
};

// Builds a pair from time-domain signals with stream-style tail padding.
TrainingPair MakeTrainingPair(const MultiChannelAudio& noisy,
                              const MultiChannelAudio& clean,
                              const Framing& framing);

struct SuppressorTrainingResult {
  NnModel model;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
  std::size_t num_samples = 0;
};

// Minimises the squared error between predicted and clean attentive
// log-power over all frames of all pairs. Throws DataError on an empty or
// inconsistent pair list.
SuppressorTrainingResult TrainSuppressor(std::span<const TrainingPair> pairs,
                                         const ContextSpec& context,
                                         const AttentiveRegion& region,
                                         const TrainingSettings& settings,
                                         MagnitudeRule rule = MagnitudeRule::kHalfLogPower);

}  // namespace windguard

#endif  // WINDGUARD_SUPPRESSOR_H_
