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

#include "windguard/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "windguard/errors.h"

namespace windguard {

std::vector<double> AnalysisWindow(const Framing& framing) {
  const auto n = static_cast<std::size_t>(framing.frame_len);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

std::vector<double> SynthesisWindow(const Framing& framing) {
  const std::vector<double> w = AnalysisWindow(framing);
  const auto n = w.size();
  const auto hop = static_cast<std::size_t>(framing.hop);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t j = i % hop; j < n; j += hop) norm += w[j] * w[j];
    g[i] = norm > 0.0 ? w[i] / norm : 0.0;
  }
  return g;
}

FrameAnalyzer::FrameAnalyzer(const Framing& framing)
    : framing_(framing),
      fft_(static_cast<std::size_t>(framing.fft_size)),
      analysis_(AnalysisWindow(framing)),
      synthesis_(SynthesisWindow(framing)),
      time_buffer_(static_cast<std::size_t>(framing.fft_size)),
      freq_buffer_(static_cast<std::size_t>(framing.num_bins())) {}

void FrameAnalyzer::Analyze(std::span<const double> frame,
                            std::span<std::complex<double>> spectrum) const {
  std::fill(time_buffer_.begin(), time_buffer_.end(), 0.0);
  for (std::size_t i = 0; i < analysis_.size(); ++i) {
    time_buffer_[i] = frame[i] * analysis_[i];
  }
  fft_.Forward(time_buffer_, spectrum);
}

void FrameAnalyzer::Synthesize(std::span<const std::complex<double>> spectrum,
                               std::span<double> frame) const {
  fft_.Inverse(spectrum, time_buffer_);
  for (std::size_t i = 0; i < synthesis_.size(); ++i) {
    frame[i] = time_buffer_[i] * synthesis_[i];
  }
}

StftGrid Stft(const MultiChannelAudio& audio, const Framing& framing) {
  audio.Validate();
  const std::size_t len = audio.num_samples();
  const std::size_t frames = FrameCount(len, framing);
  if (frames == 0) {
    throw DataError("audio has " + std::to_string(len) +
                    " samples, shorter than one frame (" +
                    std::to_string(framing.frame_len) + ")");
  }
  FrameAnalyzer analyzer(framing);
  StftGrid grid;
  grid.framing = framing;
  grid.num_samples = len;
  const auto bins = static_cast<std::size_t>(framing.num_bins());
  const auto hop = static_cast<std::size_t>(framing.hop);
  const auto frame_len = static_cast<std::size_t>(framing.frame_len);
  for (const auto& samples : audio.channels) {
    ComplexGrid spectra(frames, bins);
    for (std::size_t t = 0; t < frames; ++t) {
      analyzer.Analyze(std::span<const double>(samples).subspan(t * hop, frame_len),
                       spectra.row(t));
    }
    grid.channels.push_back(std::move(spectra));
  }
  return grid;
}

namespace {

void CheckGridShape(const StftGrid& grid) {
  if (grid.framing.fft_size <= 0 || grid.framing.hop <= 0 ||
      grid.framing.frame_len <= 0 || grid.framing.sample_rate <= 0) {
    throw DataError("STFT grid has incomplete framing metadata");
  }
  for (const auto& ch : grid.channels) {
    if (ch.rows() != grid.num_frames() ||
        ch.cols() != static_cast<std::size_t>(grid.framing.num_bins())) {
      throw DataError("STFT grid channels disagree with framing metadata");
    }
  }
  const std::size_t needed =
      grid.num_frames() == 0
          ? 0
          : (grid.num_frames() - 1) * static_cast<std::size_t>(grid.framing.hop) +
                static_cast<std::size_t>(grid.framing.frame_len);
  if (grid.num_samples < needed) {
    throw DataError("STFT grid frames extend past its signal length");
  }
}

MultiChannelAudio OverlapAdd(const StftGrid& grid, const StftGrid* phase_source) {
  CheckGridShape(grid);
  const Framing& framing = grid.framing;
  FrameAnalyzer analyzer(framing);
  MultiChannelAudio out(grid.num_channels(), grid.num_samples,
                        framing.sample_rate);
  const auto hop = static_cast<std::size_t>(framing.hop);
  const auto frame_len = static_cast<std::size_t>(framing.frame_len);
  std::vector<std::complex<double>> spectrum(
      static_cast<std::size_t>(framing.num_bins()));
  std::vector<double> frame(frame_len);
  for (std::size_t c = 0; c < grid.num_channels(); ++c) {
    auto& samples = out.channels[c];
    for (std::size_t t = 0; t < grid.num_frames(); ++t) {
      const auto row = grid.channels[c].row(t);
      if (phase_source == nullptr) {
        std::copy(row.begin(), row.end(), spectrum.begin());
      } else {
        const auto phase_row = phase_source->channels[c].row(t);
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
          spectrum[k] = std::polar(std::abs(row[k]), std::arg(phase_row[k]));
        }
      }
      analyzer.Synthesize(spectrum, frame);
      for (std::size_t i = 0; i < frame_len; ++i) samples[t * hop + i] += frame[i];
    }
  }
  return out;
}

}  // namespace

MultiChannelAudio Istft(const StftGrid& grid) { return OverlapAdd(grid, nullptr); }

MultiChannelAudio Istft(const StftGrid& grid, const StftGrid& phase_source) {
  if (!(grid.framing == phase_source.framing) ||
      grid.num_channels() != phase_source.num_channels() ||
      grid.num_frames() != phase_source.num_frames() ||
      grid.num_samples != phase_source.num_samples) {
    throw DataError("phase source framing does not match the magnitude grid");
  }
  return OverlapAdd(grid, &phase_source);
}

std::vector<RealGrid> LogPower(const StftGrid& grid) {
  std::vector<RealGrid> out;
  out.reserve(grid.num_channels());
  for (const auto& ch : grid.channels) {
    RealGrid lp(ch.rows(), ch.cols());
    const auto src = ch.data();
    auto dst = lp.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = std::log(std::norm(src[i]) + kLogPowerFloor);
    }
    out.push_back(std::move(lp));
  }
  return out;
}

std::pair<std::size_t, std::size_t> InteriorSamples(const Framing& framing,
                                                    std::size_t num_frames) {
  const auto hop = static_cast<std::size_t>(framing.hop);
  const auto first = static_cast<std::size_t>(framing.frame_len) - hop;
  const std::size_t last = num_frames * hop;
  if (last <= first) return {first, first};
  return {first, last};
}

}  // namespace windguard
