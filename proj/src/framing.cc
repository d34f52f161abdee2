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

#include "windguard/framing.h"

#include <cmath>
#include <string>

#include "windguard/errors.h"
#include "windguard/fft.h"

namespace windguard {
namespace {

int MsToSamples(double ms, int sample_rate, const char* name) {
  const double exact = ms * sample_rate / 1000.0;
  const double rounded = std::round(exact);
  if (!(ms > 0.0) || std::abs(exact - rounded) > 1e-9 || rounded < 1.0) {
    throw ConfigError(std::string(name) + " = " + std::to_string(ms) +
                      " ms is not a whole number of samples at " +
                      std::to_string(sample_rate) + " Hz");
  }
  return static_cast<int>(rounded);
}

}  // namespace

Framing ResolveFraming(const FramingConfig& config, int sample_rate) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  Framing f;
  f.sample_rate = sample_rate;
  f.frame_len = MsToSamples(config.frame_ms, sample_rate, "frame_ms");
  f.hop = MsToSamples(config.hop_ms, sample_rate, "hop_ms");
  const int chunk = MsToSamples(config.chunk_ms, sample_rate, "chunk_ms");
  if (f.hop > f.frame_len || f.frame_len % f.hop != 0) {
    throw ConfigError("hop must divide the frame length");
  }
  if (chunk % f.hop != 0) {
    throw ConfigError("chunk length must be a whole number of hops");
  }
  f.frames_per_chunk = chunk / f.hop;

  if (config.fft_size == 0) {
    f.fft_size = 1;
    while (f.fft_size < f.frame_len) f.fft_size *= 2;
  } else {
    if (config.fft_size < f.frame_len ||
        !IsPowerOfTwo(static_cast<std::size_t>(config.fft_size))) {
      throw ConfigError("fft_size must be a power of two >= frame length (" +
                        std::to_string(f.frame_len) + ")");
    }
    f.fft_size = config.fft_size;
  }
  if (f.fft_size < 4) throw ConfigError("fft_size too small");
  return f;
}

std::size_t FrameCount(std::size_t num_samples, const Framing& framing) {
  const auto frame = static_cast<std::size_t>(framing.frame_len);
  if (num_samples < frame) return 0;
  return (num_samples - frame) / static_cast<std::size_t>(framing.hop) + 1;
}

std::size_t StreamFrameCount(std::size_t num_samples, const Framing& framing) {
  const auto hop = static_cast<std::size_t>(framing.hop);
  return (num_samples + hop - 1) / hop;
}

std::size_t StreamPaddedLength(std::size_t num_samples,
                               const Framing& framing) {
  const std::size_t frames = StreamFrameCount(num_samples, framing);
  if (frames == 0) return 0;
  return (frames - 1) * static_cast<std::size_t>(framing.hop) +
         static_cast<std::size_t>(framing.frame_len);
}

std::size_t ChunkCount(std::size_t num_frames, const Framing& framing) {
  const auto per_chunk = static_cast<std::size_t>(framing.frames_per_chunk);
  return (num_frames + per_chunk - 1) / per_chunk;
}

}  // namespace windguard
