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

#include "windguard/stream.h"

#include <algorithm>
#include <chrono>
#include <limits>
#include <string>

#include "windguard/errors.h"

namespace windguard {

ChunkStream::ChunkStream(const DetectorConfig& config, const Framing& framing,
                         std::size_t num_channels, const NnModel* model)
    : config_(config),
      framing_(framing),
      num_channels_(num_channels),
      model_(model),
      detector_(config, framing, num_channels),
      analyzer_(framing),
      input_(num_channels) {
  if (num_channels < 2) throw DataError("streaming detection needs two channels");
  if (model_ != nullptr) {
    model_->Validate();
    if (!(model_->framing == framing_)) {
      throw DataError("model framing does not match the stream framing");
    }
    if (static_cast<std::size_t>(model_->context.channels) > num_channels) {
      throw DataError("model needs " + std::to_string(model_->context.channels) +
                      " channels, stream has " + std::to_string(num_channels));
    }
  }
}

StreamStep ChunkStream::Push(std::span<const std::span<const double>> channels) {
  if (finished_) throw DataError("stream already finished");
  if (channels.size() != num_channels_) {
    throw DataError("buffer has " + std::to_string(channels.size()) +
                    " channels, stream expects " + std::to_string(num_channels_));
  }
  const std::size_t n = channels.front().size();
  for (const auto& ch : channels) {
    if (ch.size() != n) throw DataError("buffer channels differ in length");
  }
  for (std::size_t c = 0; c < num_channels_; ++c) {
    input_[c].insert(input_[c].end(), channels[c].begin(), channels[c].end());
  }
  samples_in_ += n;
  StreamStep step;
  AnalyzeAvailable(step);
  return step;
}

StreamStep ChunkStream::Push(const MultiChannelAudio& chunk) {
  std::vector<std::span<const double>> views(chunk.channels.begin(), chunk.channels.end());
  return Push(views);
}

StreamStep ChunkStream::Finish() {
  if (finished_) throw DataError("stream already finished");
  StreamStep step;
  const std::size_t total = StreamFrameCount(samples_in_, framing_);
  if (total > 0) {
    const std::size_t padded = StreamPaddedLength(samples_in_, framing_);
    for (auto& ch : input_) ch.resize(padded - input_base_, 0.0);
    AnalyzeAvailable(step);
  }
  if (auto d = detector_.Flush()) step.decisions.push_back(*d);
  if (model_ != nullptr) {
    SynthesizeUpTo(total, total);
    Release(samples_in_, step);
  }
  finished_ = true;
  return step;
}

void ChunkStream::AnalyzeAvailable(StreamStep& step) {
  const auto hop = static_cast<std::size_t>(framing_.hop);
  const auto frame_len = static_cast<std::size_t>(framing_.frame_len);
  const auto bins = static_cast<std::size_t>(framing_.num_bins());
  std::vector<std::vector<std::complex<double>>> spectra(
      num_channels_, std::vector<std::complex<double>>(bins));
  std::vector<std::span<const std::complex<double>>> views(num_channels_);

  while (next_frame_ * hop + frame_len <= input_base_ + input_.front().size()) {
    const std::size_t offset = next_frame_ * hop - input_base_;
    for (std::size_t c = 0; c < num_channels_; ++c) {
      analyzer_.Analyze(std::span<const double>(input_[c]).subspan(offset, frame_len),
                        spectra[c]);
      views[c] = spectra[c];
    }
    if (auto d = detector_.PushFrame(views)) step.decisions.push_back(*d);

    if (model_ != nullptr) {
      std::vector<std::vector<double>> lp(
          static_cast<std::size_t>(model_->context.channels));
      for (std::size_t c = 0; c < lp.size(); ++c) {
        lp[c].resize(bins);
        for (std::size_t k = 0; k < bins; ++k) {
          lp[c][k] = std::log(std::norm(spectra[c][k]) + kLogPowerFloor);
        }
      }
      history_.push_back(std::move(lp));
      reference_.push_back(spectra.front());
    }
    ++next_frame_;
  }

  const std::size_t consumed = next_frame_ * hop;
  if (consumed > input_base_) {
    const std::size_t drop = std::min(consumed - input_base_, input_.front().size());
    for (auto& ch : input_) ch.erase(ch.begin(), ch.begin() + static_cast<long>(drop));
    input_base_ += drop;
  }

  if (model_ != nullptr) {
    const auto radius = static_cast<std::size_t>(model_->context.radius);
    if (next_frame_ > radius) {
      SynthesizeUpTo(next_frame_ - radius, std::numeric_limits<std::size_t>::max());
    }
    Release(next_synth_ * hop, step);
  }
}

void ChunkStream::SynthesizeUpTo(std::size_t end_frame, std::size_t total_frames) {
  const auto hop = static_cast<std::size_t>(framing_.hop);
  const auto frame_len = static_cast<std::size_t>(framing_.frame_len);
  const auto bins = static_cast<std::size_t>(framing_.num_bins());
  const int radius = model_->context.radius;
  const std::size_t dim = model_->network.input_dim();
  std::vector<double> context(dim);
  std::vector<std::complex<double>> spectrum(bins);
  std::vector<double> frame(frame_len);

  for (; next_synth_ < end_frame; ++next_synth_) {
    const std::size_t s = next_synth_;
    const std::size_t last = std::min(total_frames, next_frame_) - 1;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < static_cast<std::size_t>(model_->context.channels); ++c) {
      for (int o = -radius; o <= radius; ++o) {
        const long idx = std::clamp(static_cast<long>(s) + o, 0L, static_cast<long>(last));
        const auto& row = history_[static_cast<std::size_t>(idx) - history_base_][c];
        std::copy(row.begin(), row.end(), context.begin() + static_cast<long>(pos));
        pos += bins;
      }
    }
    const Eigen::VectorXd prediction = model_->network.Forward(context);
    ReconstructFrame(std::span<const double>(prediction.data(),
                                             static_cast<std::size_t>(prediction.size())),
                     reference_[s - history_base_], model_->magnitude_rule, spectrum);
    analyzer_.Synthesize(spectrum, frame);

    const std::size_t start = s * hop - samples_out_;
    if (ola_.size() < start + frame_len) ola_.resize(start + frame_len, 0.0);
    for (std::size_t i = 0; i < frame_len; ++i) ola_[start + i] += frame[i];

    // Frames before s + 1 - radius are no longer referenced.
    const std::size_t keep_from = s + 1 > static_cast<std::size_t>(radius)
                                      ? s + 1 - static_cast<std::size_t>(radius)
                                      : 0;
    while (history_base_ < keep_from && !history_.empty()) {
      history_.pop_front();
      reference_.pop_front();
      ++history_base_;
    }
  }
}

void ChunkStream::Release(std::size_t end_sample, StreamStep& step) {
  end_sample = std::min(end_sample, samples_in_);
  if (end_sample <= samples_out_) return;
  const std::size_t count = end_sample - samples_out_;
  if (ola_.size() < count) ola_.resize(count, 0.0);
  step.audio.insert(step.audio.end(), ola_.begin(), ola_.begin() + static_cast<long>(count));
  ola_.erase(ola_.begin(), ola_.begin() + static_cast<long>(count));
  samples_out_ = end_sample;
}

StreamResult RunStream(const MultiChannelAudio& audio, const DetectorConfig& config,
                       const Framing& framing, const NnModel* model) {
  audio.Validate();
  audio.RequireChannels(2);
  if (audio.sample_rate != framing.sample_rate) {
    throw DataError("audio sample rate " + std::to_string(audio.sample_rate) +
                    " Hz differs from the framing's " +
                    std::to_string(framing.sample_rate) + " Hz");
  }
  ChunkStream stream(config, framing, audio.num_channels(), model);
  StreamResult result;
  std::vector<double> samples;
  auto absorb = [&](StreamStep&& step) {
    result.decisions.insert(result.decisions.end(), step.decisions.begin(),
                            step.decisions.end());
    samples.insert(samples.end(), step.audio.begin(), step.audio.end());
  };
  using Clock = std::chrono::steady_clock;
  const auto chunk = static_cast<std::size_t>(framing.chunk_len());
  const std::size_t len = audio.num_samples();
  std::vector<std::span<const double>> views(audio.num_channels());
  for (std::size_t start = 0; start < len; start += chunk) {
    const std::size_t n = std::min(chunk, len - start);
    for (std::size_t c = 0; c < views.size(); ++c) {
      views[c] = std::span<const double>(audio.channels[c]).subspan(start, n);
    }
    const auto t0 = Clock::now();
    absorb(stream.Push(views));
    result.chunk_wall_ms.push_back(
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  const auto t0 = Clock::now();
  absorb(stream.Finish());
  result.chunk_wall_ms.push_back(
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  result.num_frames = stream.frames_analyzed();
  if (model != nullptr) {
    MultiChannelAudio out(1, 0, audio.sample_rate);
    out.channels[0] = std::move(samples);
    result.reconstructed = std::move(out);
  }
  return result;
}

}  // namespace windguard
