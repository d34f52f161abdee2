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

#ifndef WINDGUARD_AUDIO_H_
#define WINDGUARD_AUDIO_H_

#include <cstddef>
#include <vector>

namespace windguard {

inline constexpr int kDefaultSampleRate = 16000;
inline constexpr std::size_t kMaxChannels = 8;

// Time-domain signal, one sample vector per channel. Amplitudes are nominally
// in [-1, 1].
struct MultiChannelAudio {
  std::vector<std::vector<double>> channels;
  int sample_rate = kDefaultSampleRate;

  MultiChannelAudio() = default;
  MultiChannelAudio(std::size_t num_channels, std::size_t num_samples,
                    int rate = kDefaultSampleRate)
      : channels(num_channels, std::vector<double>(num_samples, 0.0)),
        sample_rate(rate) {}

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const {
    return channels.empty() ? 0 : channels.front().size();
  }
  double duration_s() const {
    return static_cast<double>(num_samples()) / sample_rate;
  }

  // Throws DataError unless 1..8 equal-length channels at a positive rate.
  void Validate() const;
  // Validate() plus at least `min_channels` channels.
  void RequireChannels(std::size_t min_channels) const;

  bool operator==(const MultiChannelAudio&) const = default;
};

}  // namespace windguard

#endif  // WINDGUARD_AUDIO_H_
