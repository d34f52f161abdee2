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

#ifndef WINDGUARD_WAV_H_
#define WINDGUARD_WAV_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "windguard/audio.h"

namespace windguard {

enum class WavFormat { kPcm16, kFloat32 };

// RIFF/WAVE, little-endian, PCM 16-bit or IEEE float 32-bit, 1-8 channels.
// PCM16 samples map to s / 32768, so 32767 reads as 32767/32768.
// Throws WavError (a DataError) with the failing byte offset.
MultiChannelAudio DecodeWav(std::span<const std::uint8_t> bytes);
MultiChannelAudio ReadWav(const std::string& path);

// Float32 output is the exact inverse of DecodeWav for float input. PCM16
// output truncates x * 32768 toward zero after clamping to [-32768, 32767];
// no dither is applied.
std::vector<std::uint8_t> EncodeWav(const MultiChannelAudio& audio,
                                    WavFormat format);
void WriteWav(const MultiChannelAudio& audio, const std::string& path,
              WavFormat format = WavFormat::kFloat32);

// The raw payload of the 'data' chunk; used to compare files sample-exactly.
std::span<const std::uint8_t> WavDataChunk(std::span<const std::uint8_t> bytes);

}  // namespace windguard

#endif  // WINDGUARD_WAV_H_
