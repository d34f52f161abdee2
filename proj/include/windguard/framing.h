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

#ifndef WINDGUARD_FRAMING_H_
#define WINDGUARD_FRAMING_H_

#include <cstddef>

namespace windguard {

// User-facing framing parameters in milliseconds.
struct FramingConfig {
  double frame_ms = 16.0;
  double hop_ms = 8.0;
  double chunk_ms = 200.0;
  // 0 selects the next power of two >= frame length in samples.
  int fft_size = 0;

  bool operator==(const FramingConfig&) const = default;
};

// Framing resolved against a sample rate. All lengths are in samples.
struct Framing {
  int sample_rate = 0;
  int frame_len = 0;
  int hop = 0;
  int fft_size = 0;
  int frames_per_chunk = 0;

  int num_bins() const { return fft_size / 2 + 1; }
  double bin_hz() const { return static_cast<double>(sample_rate) / fft_size; }
  int chunk_len() const { return hop * frames_per_chunk; }
  double hop_ms() const { return 1000.0 * hop / sample_rate; }

  bool operator==(const Framing&) const = default;
};

// Throws ConfigError if the millisecond values do not land on whole samples,
// the hop does not divide the frame, the chunk is not a whole number of hops,
// or an explicit fft_size is not a power of two covering the frame.
Framing ResolveFraming(const FramingConfig& config, int sample_rate);

// Frames produced by analysing `num_samples` samples without padding:
// floor((len - frame) / hop) + 1, or 0 when the signal is shorter than a frame.
std::size_t FrameCount(std::size_t num_samples, const Framing& framing);

// Streaming framing starts one frame at every hop inside the signal, so a
// signal of `num_samples` yields ceil(len / hop) frames; the tail is
// zero-padded to complete the last frame.
std::size_t StreamFrameCount(std::size_t num_samples, const Framing& framing);
std::size_t StreamPaddedLength(std::size_t num_samples, const Framing& framing);

// Chunks covering `num_frames` stream frames; the last one may be partial.
std::size_t ChunkCount(std::size_t num_frames, const Framing& framing);

}  // namespace windguard

#endif  // WINDGUARD_FRAMING_H_
