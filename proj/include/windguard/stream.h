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

// Chunked streaming harness.
//
// Audio arrives in buffers of any size. Frames are analysed as soon as their
// last sample is available, decisions are emitted when a chunk's last frame
// has been seen, and reconstructed samples are released once no later frame
// can overlap them. Suppression lags detection by the context radius.

#ifndef WINDGUARD_STREAM_H_
#define WINDGUARD_STREAM_H_

#include <complex>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "windguard/audio.h"
#include "windguard/detector.h"
#include "windguard/framing.h"
#include "windguard/stft.h"
#include "windguard/suppressor.h"

namespace windguard {

// Output released by one Push or Finish call.
struct StreamStep {
  std::vector<WindDecision> decisions;
  // Final reconstructed samples, in order; empty without a model.
  std::vector<double> audio;
};

class ChunkStream {
 public:
  // `model` may be null, in which case only detection runs. The model, when
  // given, must outlive the stream.
  ChunkStream(const DetectorConfig& config, const Framing& framing,
              std::size_t num_channels, const NnModel* model = nullptr);

  // Appends one buffer; every channel must carry the same number of samples.
  StreamStep Push(std::span<const std::span<const double>> channels);
  StreamStep Push(const MultiChannelAudio& chunk);
  // Zero-pads the tail to whole frames, closes the last chunk and releases
  // the remaining audio, truncated to the input length. Further calls throw.
  StreamStep Finish();

  std::size_t samples_in() const { return samples_in_; }
  std::size_t samples_out() const { return samples_out_; }
  std::size_t frames_analyzed() const { return next_frame_; }
  bool finished() const { return finished_; }

 private:
  void AnalyzeAvailable(StreamStep& step);
  void SynthesizeUpTo(std::size_t end_frame, std::size_t total_frames);
  void Release(std::size_t end_sample, StreamStep& step);

  DetectorConfig config_;
  Framing framing_;
  std::size_t num_channels_;
  const NnModel* model_;
  WindDetector detector_;
  FrameAnalyzer analyzer_;

  // Unconsumed input; input_[c][0] is absolute sample input_base_.
  std::vector<std::vector<double>> input_;
  std::size_t input_base_ = 0;
  std::size_t samples_in_ = 0;
  std::size_t next_frame_ = 0;

  // Log-power rows per context channel and reference spectra for frames
  // history_base_ onwards.
  std::deque<std::vector<std::vector<double>>> history_;
  std::deque<std::vector<std::complex<double>>> reference_;
  std::size_t history_base_ = 0;
  std::size_t next_synth_ = 0;

  // Overlap-add accumulator; ola_[0] is absolute sample samples_out_.
  std::vector<double> ola_;
  std::size_t samples_out_ = 0;
  bool finished_ = false;
};

struct StreamResult {
  std::vector<WindDecision> decisions;
  // One channel, input length; present when a model was supplied.
  std::optional<MultiChannelAudio> reconstructed;
  // Wall time of each Push, in milliseconds, plus one entry for Finish.
  std::vector<double> chunk_wall_ms;
  std::size_t num_frames = 0;
};

// Replays `audio` through a ChunkStream in buffers of one chunk.
StreamResult RunStream(const MultiChannelAudio& audio, const DetectorConfig& config,
                       const Framing& framing, const NnModel* model = nullptr);

}  // namespace windguard

#endif  // WINDGUARD_STREAM_H_
