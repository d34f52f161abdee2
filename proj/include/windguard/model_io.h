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


// Binary suppressor model container.
//
// Layout, all integers and floats little-endian:
//   "WGNN"  u32 version
//   i32 sample_rate, frame_len, hop, fft_size, frames_per_chunk
//   i32 context radius, context channels
//   f64 attentive cutoff (Hz)
//   u32 magnitude rule
//   u64 input, hidden and output sizes
//   f64 input_mean[input], input_scale[input]
//   f64 w1[hidden * input] (row-major), b1[hidden]
//   f64 w2[output * hidden] (row-major), b2[output]

#ifndef WINDGUARD_MODEL_IO_H_
#define WINDGUARD_MODEL_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "windguard/suppressor.h"

namespace windguard {

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> EncodeModel(const NnModel& model);
// Throws DataError on a bad magic, unknown version, truncation, trailing
// bytes, or a network whose shape disagrees with the stored layout.
NnModel DecodeModel(const std::vector<std::uint8_t>& bytes);

void SaveModel(const NnModel& model, const std::string& path);
NnModel LoadModel(const std::string& path);

}  // namespace windguard

#endif  // WINDGUARD_MODEL_IO_H_
