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


#include "windguard/model_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "windguard/errors.h"

namespace windguard {
namespace {

constexpr char kMagic[4] = {'W', 'G', 'N', 'N'};
// Guards allocation on corrupt headers.
constexpr std::uint64_t kMaxDim = 1u << 24;

class Writer {
 public:
  void Bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void I32(std::int32_t v) { U32(static_cast<std::uint32_t>(v)); }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void Need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw DataError(std::string("model file truncated while reading ") + what +
                      " at byte " + std::to_string(pos_));
    }
  }
  std::uint32_t U32(const char* what) {
    Need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t I32(const char* what) { return static_cast<std::int32_t>(U32(what)); }
  std::uint64_t U64(const char* what) {
    Need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double F64(const char* what) { return std::bit_cast<double>(U64(what)); }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> EncodeModel(const NnModel& model) {
  model.Validate();
  const ShallowNetwork& net = model.network;
  Writer w;
  w.Bytes(kMagic, 4);
  w.U32(kModelFormatVersion);
  w.I32(model.framing.sample_rate);
  w.I32(model.framing.frame_len);
  w.I32(model.framing.hop);
  w.I32(model.framing.fft_size);
  w.I32(model.framing.frames_per_chunk);
  w.I32(model.context.radius);
  w.I32(model.context.channels);
  w.F64(model.region.cutoff_hz);
  w.U32(static_cast<std::uint32_t>(model.magnitude_rule));
  w.U64(net.input_dim());
  w.U64(net.hidden_dim());
  w.U64(net.output_dim());
  for (Eigen::Index i = 0; i < net.input_mean.size(); ++i) w.F64(net.input_mean[i]);
  for (Eigen::Index i = 0; i < net.input_scale.size(); ++i) w.F64(net.input_scale[i]);
  for (Eigen::Index r = 0; r < net.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < net.w1.cols(); ++c) w.F64(net.w1(r, c));
  }
  for (Eigen::Index i = 0; i < net.b1.size(); ++i) w.F64(net.b1[i]);
  for (Eigen::Index r = 0; r < net.w2.rows(); ++r) {
    for (Eigen::Index c = 0; c < net.w2.cols(); ++c) w.F64(net.w2(r, c));
  }
  for (Eigen::Index i = 0; i < net.b2.size(); ++i) w.F64(net.b2[i]);
  return w.Take();
}

NnModel DecodeModel(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.Need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DataError("not a model file (bad magic)");
  r.U32("magic");
  const std::uint32_t version = r.U32("version");
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  NnModel model;
  model.framing.sample_rate = r.I32("framing");
  model.framing.frame_len = r.I32("framing");
  model.framing.hop = r.I32("framing");
  model.framing.fft_size = r.I32("framing");
  model.framing.frames_per_chunk = r.I32("framing");
  if (model.framing.sample_rate <= 0 || model.framing.frame_len <= 0 ||
      model.framing.hop <= 0 || model.framing.fft_size < model.framing.frame_len ||
      model.framing.frames_per_chunk <= 0) {
    throw DataError("model file has invalid framing");
  }
  model.context.radius = r.I32("context");
  model.context.channels = r.I32("context");
  model.region.cutoff_hz = r.F64("region");
  const std::uint32_t rule = r.U32("magnitude rule");
  if (rule > static_cast<std::uint32_t>(MagnitudeRule::kLiteralExp)) {
    throw DataError("model file has unknown magnitude rule " + std::to_string(rule));
  }
  model.magnitude_rule = static_cast<MagnitudeRule>(rule);
  const std::uint64_t in = r.U64("layer sizes");
  const std::uint64_t hidden = r.U64("layer sizes");
  const std::uint64_t out = r.U64("layer sizes");
  if (in == 0 || hidden == 0 || out == 0 || in > kMaxDim || hidden > kMaxDim || out > kMaxDim) {
    throw DataError("model file has implausible layer sizes");
  }
  const std::uint64_t count = 2 * in + hidden * in + hidden + out * hidden + out;
  r.Need(count * 8, "weights");

  ShallowNetwork& net = model.network;
  net = ShallowNetwork(in, hidden, out);
  for (Eigen::Index i = 0; i < net.input_mean.size(); ++i) net.input_mean[i] = r.F64("weights");
  for (Eigen::Index i = 0; i < net.input_scale.size(); ++i) net.input_scale[i] = r.F64("weights");
  for (Eigen::Index i = 0; i < net.w1.rows(); ++i) {
    for (Eigen::Index j = 0; j < net.w1.cols(); ++j) net.w1(i, j) = r.F64("weights");
  }
  for (Eigen::Index i = 0; i < net.b1.size(); ++i) net.b1[i] = r.F64("weights");
  for (Eigen::Index i = 0; i < net.w2.rows(); ++i) {
    for (Eigen::Index j = 0; j < net.w2.cols(); ++j) net.w2(i, j) = r.F64("weights");
  }
  for (Eigen::Index i = 0; i < net.b2.size(); ++i) net.b2[i] = r.F64("weights");
  if (r.pos() != r.size()) {
    throw DataError("model file has " + std::to_string(r.size() - r.pos()) +
                    " trailing bytes");
  }
  try {
    model.Validate();
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file layout invalid: ") + e.what());
  }
  return model;
}

void SaveModel(const NnModel& model, const std::string& path) {
  const std::vector<std::uint8_t> bytes = EncodeModel(model);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("failed writing " + path);
}

NnModel LoadModel(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open model file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return DecodeModel(bytes);
}

}  // namespace windguard
