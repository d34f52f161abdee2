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

#ifndef WINDGUARD_STFT_H_
#define WINDGUARD_STFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "windguard/audio.h"
#include "windguard/fft.h"
#include "windguard/framing.h"
#include "windguard/grid.h"

namespace windguard {

// Floor added to |X|^2 before taking the log.
inline constexpr double kLogPowerFloor = 1e-12;

// One-sided short-time spectra, one frames x bins grid per channel. Phase is
// kept so that resynthesis can reuse it.
struct StftGrid {
  std::vector<ComplexGrid> channels;
  Framing framing;
  // Length of the analysed signal, used to size the resynthesis.
  std::size_t num_samples = 0;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_frames() const {
    return channels.empty() ? 0 : channels.front().rows();
  }
  std::size_t num_bins() const { return framing.num_bins(); }
  double bin_hz() const { return framing.bin_hz(); }

  bool operator==(const StftGrid&) const = default;
};

// Periodic Hann window of frame_len samples.
std::vector<double> AnalysisWindow(const Framing& framing);

// Synthesis window g = w / sum_k w^2(n - k*hop). Paired with the analysis
// window it satisfies sum_k w(n - k*hop) g(n - k*hop) = 1, so overlap-add
// reconstructs exactly wherever a sample is covered by a full set of frames.
std::vector<double> SynthesisWindow(const Framing& framing);

// Reusable per-frame transform; holds the FFT plan and both windows.
class FrameAnalyzer {
 public:
  explicit FrameAnalyzer(const Framing& framing);

  const Framing& framing() const { return framing_; }
  // `frame` has frame_len samples; `spectrum` receives num_bins values.
  void Analyze(std::span<const double> frame,
               std::span<std::complex<double>> spectrum) const;
  // Inverse FFT plus synthesis window; `frame` receives frame_len samples.
  void Synthesize(std::span<const std::complex<double>> spectrum,
                  std::span<double> frame) const;

 private:
  Framing framing_;
  RealFft fft_;
  std::vector<double> analysis_;
  std::vector<double> synthesis_;
  mutable std::vector<double> time_buffer_;
  mutable std::vector<std::complex<double>> freq_buffer_;
};

// Throws DataError if the audio is shorter than one frame.
StftGrid Stft(const MultiChannelAudio& audio, const Framing& framing);

// Overlap-add resynthesis to grid.num_samples samples.
MultiChannelAudio Istft(const StftGrid& grid);
// As above, but with magnitudes from `grid` and phases from `phase_source`.
// Throws DataError when the two grids disagree on framing or shape.
MultiChannelAudio Istft(const StftGrid& grid, const StftGrid& phase_source);

// Natural log of |X|^2 + kLogPowerFloor, per channel.
std::vector<RealGrid> LogPower(const StftGrid& grid);

// Samples [first, last) where every covering frame is present, i.e. where
// Istft(Stft(x)) reproduces x.
std::pair<std::size_t, std::size_t> InteriorSamples(const Framing& framing,
                                                    std::size_t num_frames);

}  // namespace windguard

#endif  // WINDGUARD_STFT_H_
