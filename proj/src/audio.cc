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

#include "windguard/audio.h"

#include <string>

#include "windguard/errors.h"

namespace windguard {

void MultiChannelAudio::Validate() const {
  if (sample_rate <= 0) {
    throw DataError("sample rate must be positive, got " +
                    std::to_string(sample_rate));
  }
  if (channels.empty() || channels.size() > kMaxChannels) {
    throw DataError("channel count must be in [1, 8], got " +
                    std::to_string(channels.size()));
  }
  const std::size_t len = channels.front().size();
  for (const auto& ch : channels) {
    if (ch.size() != len) throw DataError("channels have unequal lengths");
  }
}

void MultiChannelAudio::RequireChannels(std::size_t min_channels) const {
  Validate();
  if (channels.size() < min_channels) {
    throw DataError("need at least " + std::to_string(min_channels) +
                    " channels, got " + std::to_string(channels.size()));
  }
}

}  // namespace windguard
