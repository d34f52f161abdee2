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


#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "test_util.h"
#include "windguard/config.h"
#include "windguard/errors.h"
#include "windguard/model_io.h"
#include "windguard/wav.h"

namespace windguard {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("windguard_io_" + std::to_string(::getpid()) + "_" + name))
      .string();
}

// Minimal hand-assembled PCM16 file, independent of EncodeWav.
std::vector<std::uint8_t> Pcm16File(const std::vector<std::int16_t>& samples, int channels) {
  std::vector<std::uint8_t> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto tag = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  tag("RIFF");
  u32(36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(1);
  u16(static_cast<std::uint16_t>(channels));
  u32(16000);
  u32(16000u * 2u * static_cast<std::uint32_t>(channels));
  u16(static_cast<std::uint16_t>(2 * channels));
  u16(16);
  tag("data");
  u32(data_bytes);
  for (std::int16_t s : samples) u16(static_cast<std::uint16_t>(s));
  return b;
}

TEST(Wav, FloatRoundTripIsSampleExact) {
  MultiChannelAudio a = testing::RandomAudio(3, 1234, 9);
  for (auto& ch : a.channels) {
    for (double& v : ch) v = static_cast<float>(v);
  }
  const std::vector<std::uint8_t> bytes = EncodeWav(a, WavFormat::kFloat32);
  const MultiChannelAudio back = DecodeWav(bytes);
  EXPECT_EQ(back, a);
  const std::vector<std::uint8_t> again = EncodeWav(back, WavFormat::kFloat32);
  const auto d1 = WavDataChunk(bytes);
  const auto d2 = WavDataChunk(again);
  ASSERT_EQ(d1.size(), d2.size());
  EXPECT_EQ(std::memcmp(d1.data(), d2.data(), d1.size()), 0);
}

TEST(Wav, FileRoundTrip) {
  MultiChannelAudio a = testing::RandomAudio(2, 500, 4);
  for (auto& ch : a.channels) {
    for (double& v : ch) v = static_cast<float>(v);
  }
  const std::string path = TempPath("rt.wav");
  WriteWav(a, path);
  EXPECT_EQ(ReadWav(path), a);
  std::filesystem::remove(path);
}

TEST(Wav, Pcm16Scaling) {
  const MultiChannelAudio a = DecodeWav(Pcm16File({32767, -32768, 0, 1, -1, 16384}, 2));
  ASSERT_EQ(a.num_channels(), 2u);
  ASSERT_EQ(a.num_samples(), 3u);
  EXPECT_EQ(a.channels[0][0], 32767.0 / 32768.0);
  EXPECT_EQ(a.channels[1][0], -1.0);
  EXPECT_EQ(a.channels[0][1], 0.0);
  EXPECT_EQ(a.channels[1][1], 1.0 / 32768.0);
  EXPECT_EQ(a.channels[0][2], -1.0 / 32768.0);
  EXPECT_EQ(a.channels[1][2], 0.5);
}

TEST(Wav, Pcm16EncodeDecodeIsIdentityOnGrid) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dist(-32768, 32767);
  std::vector<std::int16_t> samples(400);
  for (auto& s : samples) s = static_cast<std::int16_t>(dist(rng));
  const std::vector<std::uint8_t> file = Pcm16File(samples, 2);
  const MultiChannelAudio a = DecodeWav(file);
  const auto re = EncodeWav(a, WavFormat::kPcm16);
  const auto d1 = WavDataChunk(file);
  const auto d2 = WavDataChunk(re);
  ASSERT_EQ(d1.size(), d2.size());
  EXPECT_EQ(std::memcmp(d1.data(), d2.data(), d1.size()), 0);
}

TEST(Wav, Pcm16ClampsOutOfRange) {
  MultiChannelAudio a(1, 2);
  a.channels[0] = {1.5, -2.0};
  const MultiChannelAudio back = DecodeWav(EncodeWav(a, WavFormat::kPcm16));
  EXPECT_EQ(back.channels[0][0], 32767.0 / 32768.0);
  EXPECT_EQ(back.channels[0][1], -1.0);
}

void ExpectWavError(const std::vector<std::uint8_t>& bytes, const std::string& needle) {
  try {
    DecodeWav(bytes);
    ADD_FAILURE() << "expected WavError mentioning " << needle;
  } catch (const WavError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
}

TEST(Wav, MalformedFilesNameTheProblem) {
  const std::vector<std::uint8_t> good = Pcm16File({1, 2, 3, 4}, 2);
  ExpectWavError({good.begin(), good.begin() + 8}, "RIFF");
  std::vector<std::uint8_t> bad = good;
  bad[0] = 'X';
  ExpectWavError(bad, "RIFF");
  bad = good;
  bad[8] = 'X';
  ExpectWavError(bad, "WAVE");
  // Cut inside the data payload.
  ExpectWavError({good.begin(), good.end() - 3}, "'data'");
  // Header only: no data chunk at all.
  ExpectWavError({good.begin(), good.begin() + 36}, "'data'");
  // Cut inside the fmt chunk.
  ExpectWavError({good.begin(), good.begin() + 24}, "'fmt '");
  bad = good;
  bad[20] = 2;  // ADPCM
  ExpectWavError(bad, "codec");
}

TEST(Wav, MissingFileIsDataError) {
  EXPECT_THROW(ReadWav(TempPath("does_not_exist.wav")), DataError);
}

TEST(Config, EmptyTextGivesDefaults) {
  EXPECT_EQ(ParseConfig(""), PipelineConfig{});
}

TEST(Config, ParsesKnownKeys) {
  const PipelineConfig c = ParseConfig(
      "[ssc]\nthreshold = 0.9\ntransform_sigma = 0.35\n"
      "[coherence]\nthreshold = 0.98\n"
      "[region]\ncutoff_hz = 750\n"
      "[context]\nradius = 2\n"
      "[training]\noptimizer = gd\nliteral_exp = true\n"
      "[paths]\nmodel = /tmp/m.bin\n"
      "[run]\nseed = 42\n");
  EXPECT_EQ(c.detector.ssc.ssc_threshold, 0.9);
  EXPECT_EQ(c.detector.ssc.transform_sigma, 0.35);
  EXPECT_EQ(c.detector.coherence.mc_threshold, 0.98);
  EXPECT_EQ(c.region.cutoff_hz, 750.0);
  EXPECT_EQ(c.context.radius, 2);
  EXPECT_EQ(c.training.optimizer, Optimizer::kGradientDescent);
  EXPECT_EQ(c.magnitude_rule, MagnitudeRule::kLiteralExp);
  EXPECT_EQ(c.paths.model, "/tmp/m.bin");
  EXPECT_EQ(c.seed, 42u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(ParseConfig("[ssc]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[nosuch]\nthreshold = 1\n"), ConfigError);
  EXPECT_THROW(ParseConfig("seed = 3\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[ssc]\nthreshold = abc\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[ssc]\nthreshold = 0.5x\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[training]\nliteral_exp = maybe\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[training]\noptimizer = adam\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[ssc\nthreshold = 1\n"), ConfigError);
}

TEST(Config, RejectsInconsistentValues) {
  EXPECT_THROW(ParseConfig("[region]\ncutoff_hz = 8000.5\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[region]\ncutoff_hz = 0\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[framing]\nhop_ms = 7\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[framing]\nfft_size = 200\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[coherence]\nthreshold = 1.5\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[context]\nradius = -1\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[training]\nhidden = 0\n"), ConfigError);
}

TEST(Config, FormatRoundTrips) {
  PipelineConfig c;
  c.detector.ssc.ssc_threshold = 0.1 + 0.2;
  c.detector.coherence.mc_threshold = 0.98;
  c.detector.ssc.transform_sigma = 1.0 / 3.0;
  c.region.cutoff_hz = 437.5;
  c.context = {4, 1};
  c.training.hidden = 17;
  c.training.optimizer = Optimizer::kGradientDescent;
  c.magnitude_rule = MagnitudeRule::kLiteralExp;
  c.paths = {"model dir/m.bin", "out"};
  c.seed = 0xFFFFFFFFFFFFFFFFull;
  EXPECT_EQ(ParseConfig(FormatConfig(c)), c);
  EXPECT_EQ(ParseConfig(FormatConfig(PipelineConfig{})), PipelineConfig{});
}

TEST(Config, LoadFromFile) {
  EXPECT_THROW(LoadConfig(TempPath("missing.ini")), ConfigError);
}

NnModel RandomModel(std::uint64_t seed) {
  NnModel m;
  m.framing = ResolveFraming({}, 16000);
  m.context = {1, 2};
  m.region.cutoff_hz = 300.0;
  const std::size_t in = m.context.InputDim(static_cast<std::size_t>(m.framing.num_bins()));
  m.network = ShallowNetwork(in, 5, static_cast<std::size_t>(m.region.NumBins(m.framing)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto fill = [&](auto& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  };
  fill(m.network.w1);
  fill(m.network.b1);
  fill(m.network.w2);
  fill(m.network.b2);
  fill(m.network.input_mean);
  for (Eigen::Index i = 0; i < m.network.input_scale.size(); ++i) {
    m.network.input_scale[i] = 0.5 + std::abs(g(rng));
  }
  m.Validate();
  return m;
}

TEST(ModelIo, RoundTripIsExact) {
  const NnModel m = RandomModel(1);
  EXPECT_EQ(DecodeModel(EncodeModel(m)), m);
  const std::string path = TempPath("model.bin");
  SaveModel(m, path);
  EXPECT_EQ(LoadModel(path), m);
  std::filesystem::remove(path);
  EXPECT_THROW(LoadModel(path), DataError);
}

TEST(ModelIo, CorruptContainersAreRejected) {
  const std::vector<std::uint8_t> good = EncodeModel(RandomModel(2));
  std::vector<std::uint8_t> bad = good;
  bad[0] = 'X';
  EXPECT_THROW(DecodeModel(bad), DataError);
  bad = good;
  bad[4] = 99;  // version
  EXPECT_THROW(DecodeModel(bad), DataError);
  EXPECT_THROW(DecodeModel({good.begin(), good.end() - 1}), DataError);
  EXPECT_THROW(DecodeModel({good.begin(), good.begin() + 10}), DataError);
  bad = good;
  bad.push_back(0);
  EXPECT_THROW(DecodeModel(bad), DataError);
  EXPECT_THROW(DecodeModel({}), DataError);
}

TEST(ModelIo, LayoutMismatchIsRejected) {
  NnModel m = RandomModel(3);
  m.context.radius = 2;  // network input no longer matches the context layout
  EXPECT_THROW(DecodeModel(EncodeModel(m)), DataError);
}

TEST(ModelIo, ModelMustMatchConfig) {
  const NnModel m = RandomModel(4);
  PipelineConfig c;
  c.context = m.context;
  c.region = m.region;
  EXPECT_NO_THROW(CheckModelMatchesConfig(m, c));
  PipelineConfig other = c;
  other.context.radius = 3;
  EXPECT_THROW(CheckModelMatchesConfig(m, other), ConfigError);
  other = c;
  other.region.cutoff_hz = 500.0;
  EXPECT_THROW(CheckModelMatchesConfig(m, other), ConfigError);
  other = c;
  other.framing.hop_ms = 4.0;
  EXPECT_THROW(CheckModelMatchesConfig(m, other), ConfigError);
}

}  // namespace
}  // namespace windguard
