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

#include "windguard/suppressor.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "windguard/errors.h"

namespace windguard {

int AttentiveRegion::NumBins(const Framing& framing) const {
  const double bin_hz = framing.bin_hz();
  if (!(cutoff_hz > 0.0)) throw ConfigError("attentive cutoff must be positive");
  // Bins mu with mu * bin_hz < cutoff.
  const int count = static_cast<int>(std::ceil(cutoff_hz / bin_hz - 1e-12));
  if (count < 1) throw ConfigError("attentive region is empty");
  if (count >= framing.num_bins()) {
    throw ConfigError("attentive cutoff " + std::to_string(cutoff_hz) +
                      " Hz must lie strictly below Nyquist");
  }
  return count;
}

bool AttentiveRegion::Contains(int bin, const Framing& framing) const {
  return bin >= 0 && bin < NumBins(framing);
}

void ContextSpec::Validate() const {
  if (radius < 0) throw ConfigError("context radius must be >= 0");
  if (channels < 1 || channels > 8) throw ConfigError("context channels must be in [1, 8]");
}

double MagnitudeFromLogPower(double y, MagnitudeRule rule) {
  return rule == MagnitudeRule::kHalfLogPower ? std::exp(0.5 * y) : std::exp(y);
}

void NnModel::Validate() const {
  network.Validate();
  context.Validate();
  const std::size_t bins = static_cast<std::size_t>(framing.num_bins());
  if (network.input_dim() != context.InputDim(bins)) {
    throw DataError("model input layer has " + std::to_string(network.input_dim()) +
                    " units; context layout needs " +
                    std::to_string(context.InputDim(bins)));
  }
  int attentive = 0;
  try {
    attentive = region.NumBins(framing);
  } catch (const ConfigError& e) {
    throw DataError(std::string("model region invalid: ") + e.what());
  }
  if (network.output_dim() != static_cast<std::size_t>(attentive)) {
    throw DataError("model output layer has " + std::to_string(network.output_dim()) +
                    " units; attentive region has " + std::to_string(attentive) +
                    " bins");
  }
}

void BuildContextInto(std::span<const RealGrid> log_power, std::size_t t,
                      const ContextSpec& spec, std::span<double> out) {
  const auto channels = static_cast<std::size_t>(spec.channels);
  if (log_power.size() < channels) {
    throw DataError("context needs " + std::to_string(channels) + " channels");
  }
  const std::size_t frames = log_power.front().rows();
  const std::size_t bins = log_power.front().cols();
  if (frames == 0) throw DataError("context needs at least one frame");
  if (out.size() != spec.InputDim(bins)) throw DataError("context buffer has the wrong size");
  std::size_t pos = 0;
  for (std::size_t c = 0; c < channels; ++c) {
    for (int o = -spec.radius; o <= spec.radius; ++o) {
      const long idx = std::clamp(static_cast<long>(t) + o, 0L,
                                  static_cast<long>(frames) - 1);
      const auto row = log_power[c].row(static_cast<std::size_t>(idx));
      std::copy(row.begin(), row.end(), out.begin() + static_cast<long>(pos));
      pos += bins;
    }
  }
}

std::vector<double> BuildContext(std::span<const RealGrid> log_power,
                                 std::size_t t, const ContextSpec& spec) {
  if (log_power.empty()) throw DataError("context needs at least one channel");
  std::vector<double> out(spec.InputDim(log_power.front().cols()));
  BuildContextInto(log_power, t, spec, out);
  return out;
}

Eigen::VectorXd NnForward(const NnModel& model, std::span<const double> input) {
  return model.network.Forward(input);
}

RealGrid PredictAttentive(const NnModel& model, std::span<const RealGrid> log_power) {
  if (log_power.empty()) throw DataError("no log-power channels");
  const std::size_t frames = log_power.front().rows();
  const std::size_t dim = model.network.input_dim();
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(dim));
  std::vector<double> context(dim);
  for (std::size_t t = 0; t < frames; ++t) {
    BuildContextInto(log_power, t, model.context, context);
    inputs.row(static_cast<Eigen::Index>(t)) =
        Eigen::Map<const Eigen::RowVectorXd>(context.data(), static_cast<Eigen::Index>(dim));
  }
  const Eigen::MatrixXd y = model.network.ForwardBatch(inputs);
  RealGrid out(frames, model.network.output_dim());
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < out.cols(); ++k) {
      out(t, k) = y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

void ReconstructFrame(std::span<const double> prediction,
                      std::span<const std::complex<double>> reference,
                      MagnitudeRule rule, std::span<std::complex<double>> out) {
  std::copy(reference.begin(), reference.end(), out.begin());
  for (std::size_t k = 0; k < prediction.size(); ++k) {
    // Suppression never adds energy to a bin.
    const double magnitude =
        std::min(MagnitudeFromLogPower(prediction[k], rule), std::abs(reference[k]));
    out[k] = std::polar(magnitude, std::arg(reference[k]));
  }
}

namespace {

void CheckGridAgainstModel(const NnModel& model, const StftGrid& grid) {
  if (!(grid.framing == model.framing)) {
    throw DataError("grid framing does not match the model's framing");
  }
  if (grid.num_channels() < static_cast<std::size_t>(model.context.channels)) {
    throw DataError("model needs " + std::to_string(model.context.channels) +
                    " channels, grid has " + std::to_string(grid.num_channels()));
  }
}

}  // namespace

StftGrid AttentiveReconstruct(const NnModel& model, const StftGrid& noisy) {
  model.Validate();
  CheckGridAgainstModel(model, noisy);
  const std::vector<RealGrid> log_power = LogPower(noisy);
  const RealGrid prediction = PredictAttentive(model, log_power);
  StftGrid out;
  out.framing = noisy.framing;
  out.num_samples = noisy.num_samples;
  const ComplexGrid& reference = noisy.channels.front();
  ComplexGrid rebuilt(reference.rows(), reference.cols());
  for (std::size_t t = 0; t < reference.rows(); ++t) {
    ReconstructFrame(prediction.row(t), reference.row(t), model.magnitude_rule,
                     rebuilt.row(t));
  }
  out.channels.push_back(std::move(rebuilt));
  return out;
}

namespace {

MultiChannelAudio PadTail(const MultiChannelAudio& audio, const Framing& framing) {
  MultiChannelAudio padded = audio;
  const std::size_t len = StreamPaddedLength(audio.num_samples(), framing);
  for (auto& ch : padded.channels) ch.resize(len, 0.0);
  return padded;
}

}  // namespace

MultiChannelAudio Suppress(const MultiChannelAudio& audio, const NnModel& model) {
  audio.RequireChannels(std::max<std::size_t>(2, static_cast<std::size_t>(model.context.channels)));
  if (audio.sample_rate != model.framing.sample_rate) {
    throw DataError("audio sample rate " + std::to_string(audio.sample_rate) +
                    " Hz differs from the model's " +
                    std::to_string(model.framing.sample_rate) + " Hz");
  }
  const std::size_t len = audio.num_samples();
  if (len == 0) return MultiChannelAudio(1, 0, audio.sample_rate);
  const StftGrid noisy = Stft(PadTail(audio, model.framing), model.framing);
  MultiChannelAudio out = Istft(AttentiveReconstruct(model, noisy));
  out.channels.front().resize(len);
  return out;
}

TrainingPair MakeTrainingPair(const MultiChannelAudio& noisy,
                              const MultiChannelAudio& clean,
                              const Framing& framing) {
  noisy.Validate();
  clean.Validate();
  if (noisy.num_samples() != clean.num_samples()) {
    throw DataError("noisy and clean signals differ in length");
  }
  TrainingPair pair;
  pair.noisy = Stft(PadTail(noisy, framing), framing);
  MultiChannelAudio reference(1, clean.num_samples(), clean.sample_rate);
  reference.channels[0] = clean.channels[0];
  pair.clean = Stft(PadTail(reference, framing), framing);
  return pair;
}

SuppressorTrainingResult TrainSuppressor(std::span<const TrainingPair> pairs,
                                         const ContextSpec& context,
                                         const AttentiveRegion& region,
                                         const TrainingSettings& settings,
                                         MagnitudeRule rule) {
  if (pairs.empty()) throw DataError("no training pairs");
  context.Validate();
  const Framing framing = pairs.front().noisy.framing;
  const int out_bins = region.NumBins(framing);
  const std::size_t bins = static_cast<std::size_t>(framing.num_bins());
  const std::size_t dim = context.InputDim(bins);

  std::size_t total = 0;
  for (const TrainingPair& p : pairs) {
    if (!(p.noisy.framing == framing) || !(p.clean.framing == framing)) {
      throw DataError("training pairs use different framings");
    }
    if (p.noisy.num_frames() != p.clean.num_frames()) {
      throw DataError("training pair is not frame-synchronous");
    }
    if (p.noisy.num_channels() < static_cast<std::size_t>(context.channels) ||
        p.clean.num_channels() != 1) {
      throw DataError("training pair has the wrong channel counts");
    }
    total += p.noisy.num_frames();
  }
  if (total == 0) throw DataError("training pairs contain no frames");

  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(dim));
  Eigen::MatrixXd targets(static_cast<Eigen::Index>(total), out_bins);
  std::vector<double> buffer(dim);
  Eigen::Index row = 0;
  for (const TrainingPair& p : pairs) {
    const std::vector<RealGrid> noisy_lp = LogPower(p.noisy);
    const std::vector<RealGrid> clean_lp = LogPower(p.clean);
    for (std::size_t t = 0; t < p.noisy.num_frames(); ++t, ++row) {
      BuildContextInto(noisy_lp, t, context, buffer);
      inputs.row(row) =
          Eigen::Map<const Eigen::RowVectorXd>(buffer.data(), static_cast<Eigen::Index>(dim));
      for (int k = 0; k < out_bins; ++k) {
        targets(row, k) = clean_lp[0](t, static_cast<std::size_t>(k));
      }
    }
  }

  TrainingResult trained = TrainNetwork(std::move(inputs), targets, settings);
  SuppressorTrainingResult result;
  result.model.network = std::move(trained.network);
  result.model.framing = framing;
  result.model.context = context;
  result.model.region = region;
  result.model.magnitude_rule = rule;
  result.initial_loss = trained.initial_loss;
  result.final_loss = trained.final_loss;
  result.iterations = trained.iterations;
  result.num_samples = total;
  return result;
}

}  // namespace windguard
