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

#include "windguard/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "windguard/errors.h"

namespace windguard {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

std::uint16_t U16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t U32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool TagIs(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

struct ChunkRef {
  std::size_t offset = 0;  // start of the payload
  std::size_t size = 0;
};

struct Layout {
  ChunkRef fmt;
  ChunkRef data;
};

Layout Scan(std::span<const std::uint8_t> b) {
  if (b.size() < 12) throw WavError("file too short for a RIFF header", b.size());
  if (!TagIs(b, 0, "RIFF")) throw WavError("missing RIFF tag", 0);
  if (!TagIs(b, 8, "WAVE")) throw WavError("RIFF form type is not WAVE", 8);
  std::optional<ChunkRef> fmt;
  std::optional<ChunkRef> data;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::size_t size = U32(b, at + 4);
    const ChunkRef ref{at + 8, size};
    if (TagIs(b, at, "fmt ")) {
      if (ref.offset + size > b.size()) {
        throw WavError("'fmt ' chunk truncated", b.size());
      }
      fmt = ref;
    } else if (TagIs(b, at, "data")) {
      if (ref.offset + size > b.size()) {
        throw WavError("'data' chunk truncated: header declares " +
                           std::to_string(size) + " bytes, " +
                           std::to_string(b.size() - ref.offset) + " present",
                       b.size());
      }
      data = ref;
    }
    at = ref.offset + size + (size & 1);
    if (fmt && data) break;
  }
  if (!fmt) throw WavError("missing 'fmt ' chunk", std::min(at, b.size()));
  if (!data) throw WavError("missing 'data' chunk", std::min(at, b.size()));
  return {*fmt, *data};
}

}  // namespace

MultiChannelAudio DecodeWav(std::span<const std::uint8_t> b) {
  const Layout layout = Scan(b);
  const std::size_t f = layout.fmt.offset;
  if (layout.fmt.size < 16) throw WavError("'fmt ' chunk shorter than 16 bytes", f);
  std::uint16_t format = U16(b, f);
  const std::uint16_t channels = U16(b, f + 2);
  const std::uint32_t rate = U32(b, f + 4);
  const std::uint16_t bits = U16(b, f + 14);
  if (format == kFormatExtensible) {
    if (layout.fmt.size < 40) throw WavError("extensible 'fmt ' chunk too short", f);
    format = U16(b, f + 24);  // first two bytes of the sub-format GUID
  }
  if (channels == 0 || channels > kMaxChannels) {
    throw WavError("unsupported channel count " + std::to_string(channels), f + 2);
  }
  if (rate == 0) throw WavError("sample rate is zero", f + 4);
  std::size_t width = 0;
  if (format == kFormatPcm && bits == 16) {
    width = 2;
  } else if (format == kFormatFloat && bits == 32) {
    width = 4;
  } else {
    throw WavError("unsupported codec (format " + std::to_string(format) + ", " +
                       std::to_string(bits) + " bits)",
                   f);
  }
  const std::size_t frame_bytes = width * channels;
  const std::size_t frames = layout.data.size / frame_bytes;
  MultiChannelAudio audio(channels, frames, static_cast<int>(rate));
  const std::uint8_t* p = b.data() + layout.data.offset;
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* s = p + i * frame_bytes + c * width;
      if (width == 2) {
        std::int16_t v;
        std::memcpy(&v, s, 2);
        audio.channels[c][i] = v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, s, 4);
        audio.channels[c][i] = v;
      }
    }
  }
  return audio;
}

MultiChannelAudio ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return DecodeWav(bytes);
  } catch (const WavError& e) {
    throw WavError(path + ": " + e.what(), e.offset());
  }
}

std::vector<std::uint8_t> EncodeWav(const MultiChannelAudio& audio,
                                    WavFormat format) {
  audio.Validate();
  const auto channels = static_cast<std::uint16_t>(audio.num_channels());
  const std::size_t width = format == WavFormat::kPcm16 ? 2 : 4;
  const std::size_t data_size = audio.num_samples() * channels * width;
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  auto put_tag = [&](const char* tag) { out.insert(out.end(), tag, tag + 4); };
  auto put16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto put32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put_tag("RIFF");
  put32(static_cast<std::uint32_t>(36 + data_size));
  put_tag("WAVE");
  put_tag("fmt ");
  put32(16);
  put16(format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  put16(channels);
  put32(static_cast<std::uint32_t>(audio.sample_rate));
  put32(static_cast<std::uint32_t>(audio.sample_rate * channels * width));
  put16(static_cast<std::uint16_t>(channels * width));
  put16(static_cast<std::uint16_t>(width * 8));
  put_tag("data");
  put32(static_cast<std::uint32_t>(data_size));
  for (std::size_t i = 0; i < audio.num_samples(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = audio.channels[c][i];
      std::uint8_t bytes[4];
      if (format == WavFormat::kPcm16) {
        const double scaled = std::clamp(x * 32768.0, -32768.0, 32767.0);
        const auto v = static_cast<std::int16_t>(scaled);  // truncates
        std::memcpy(bytes, &v, 2);
      } else {
        const auto v = static_cast<float>(x);
        std::memcpy(bytes, &v, 4);
      }
      out.insert(out.end(), bytes, bytes + width);
    }
  }
  return out;
}

void WriteWav(const MultiChannelAudio& audio, const std::string& path,
              WavFormat format) {
  const std::vector<std::uint8_t> bytes = EncodeWav(audio, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path);
}

std::span<const std::uint8_t> WavDataChunk(std::span<const std::uint8_t> bytes) {
  const Layout layout = Scan(bytes);
  return bytes.subspan(layout.data.offset, layout.data.size);
}

}  // namespace windguard
