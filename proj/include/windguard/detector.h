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

// Real-time wind detection.
//
// Each frame contributes two features. The sub-band centroid indicator rises
// towards 1 when spectral power piles up near DC; it is smoothed over a sliding
// window, squashed by 1 - exp(-v^2 / 2 sigma^2) and maxed across channels. The
// band-averaged magnitude of coherence between the first two channels is low
// for wind, which is spatially uncorrelated, and high for speech. A chunk is
// declared windy when the centroid score is high AND the coherence score is
// low; the binary decision then passes through a chunk-count hysteresis.

#ifndef WINDGUARD_DETECTOR_H_
#define WINDGUARD_DETECTOR_H_

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "windguard/audio.h"
#include "windguard/framing.h"

namespace windguard {

struct SscConfig {
  int mu1 = 0;
  // Clamped to num_bins - 1 when resolved against a framing.
  int mu2 = 100;
  double smooth_ms = 500.0;
  double transform_sigma = 0.35;
  double ssc_threshold = 0.6;

  bool operator==(const SscConfig&) const = default;
};

struct CoherenceConfig {
  double alpha_s = 0.8;
  double mc_threshold = 0.4;
  double band_low_hz = 100.0;
  double band_high_hz = 2000.0;
  double smooth_ms = 500.0;

  bool operator==(const CoherenceConfig&) const = default;
};

struct DetectorConfig {
  SscConfig ssc;
  CoherenceConfig coherence;
  // A decision flips after this many consecutive chunks disagree with it.
  int hysteresis_chunks = 2;
  // Channels whose cross-spectrum feeds the coherence feature.
  int coherence_channel_a = 0;
  int coherence_channel_b = 1;

  bool operator==(const DetectorConfig&) const = default;
};

// Throws ConfigError on out-of-range parameters or a band that does not fit
// the framing. Returns a copy with mu2 clamped to the bin count.
DetectorConfig ResolveDetectorConfig(const DetectorConfig& config,
                                     const Framing& framing);

// Inclusive bin range [first, last] averaged by the coherence feature. DC is
// always excluded.
struct BinRange {
  int first = 0;
  int last = 0;
  int size() const { return last - first + 1; }
};
BinRange CoherenceBand(const CoherenceConfig& config, const Framing& framing);

// Frames spanned by a smoothing window of `ms` milliseconds (at least 1).
std::size_t SmoothingFrames(double ms, const Framing& framing);

// ---------------------------------------------------------------------------
// Per-frame building blocks.

// Power-weighted mean bin index over [mu1, mu2]. Returns nullopt for a band
// with no power ("silent band").
std::optional<double> SpectralCentroid(std::span<const double> power, int mu1,
                                       int mu2);

// (mu2 - centroid) / mu2, clamped to [0, 1].
double SscIndicator(double centroid, int mu2);

// Indicator for one frame of spectra; a silent band maps to 0.
double FrameSscIndicator(std::span<const std::complex<double>> spectrum,
                         int mu1, int mu2);

// 1 - exp(-v^2 / (2 sigma^2)).
double InverseGaussianTransform(double value, double sigma);

// Elementwise maximum across channels.
double ChannelMax(std::span<const double> scores);
std::vector<double> ChannelMax(const std::vector<std::vector<double>>& streams);

// Sliding-window mean with a fixed capacity. Until the buffer fills the mean
// is over the values seen so far.
class MovingAverage {
 public:
  explicit MovingAverage(std::size_t capacity);

  double Push(double value);
  double mean() const;
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return values_.size(); }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
  std::size_t count_ = 0;
};

// Transformed, smoothed centroid score of one channel stream.
std::vector<double> SmoothAndTransform(std::span<const double> raw,
                                       const SscConfig& config,
                                       MovingAverage& history);

// Recursively smoothed auto- and cross-power spectra of a channel pair.
struct CrossSpectra {
  std::vector<double> auto_a;
  std::vector<double> auto_b;
  std::vector<std::complex<double>> cross;

  explicit CrossSpectra(std::size_t num_bins = 0)
      : auto_a(num_bins, 0.0), auto_b(num_bins, 0.0), cross(num_bins) {}
  std::size_t num_bins() const { return cross.size(); }
};

// Phi <- alpha Phi + (1 - alpha) X_i conj(X_j) for (a,a), (b,b) and (a,b).
void PsdUpdate(CrossSpectra& psd, std::span<const std::complex<double>> x_a,
               std::span<const std::complex<double>> x_b, double alpha_s);

// Per-bin |Phi_ab| / sqrt(Phi_aa Phi_bb) clamped to [0, 1], or nullopt when
// either auto-spectrum is below the floor.
std::optional<double> MagnitudeCoherence(const CrossSpectra& psd,
                                         std::size_t bin);

struct BandCoherenceResult {
  double mean = 0.0;
  // True when every bin of the band was below the floor; mean is then 0.
  bool silent = false;
};
BandCoherenceResult BandCoherence(const CrossSpectra& psd, BinRange band);

inline constexpr double kPsdFloor = 1e-12;

// ---------------------------------------------------------------------------
// Chunk-level decision.

struct WindDecision {
  std::size_t chunk_index = 0;
  std::size_t first_frame = 0;
  std::size_t num_frames = 0;
  double t_start_ms = 0.0;
  bool wind_present = false;
  // Transformed centroid score and smoothed coherence score, both in [0, 1].
  double ssc_score = 0.0;
  double mc_score = 0.0;
  // Smoothed centroid indicator before the transform, maxed over channels.
  // Lets calibration replay other transform widths without re-analysis.
  double ssc_raw = 0.0;
  bool mc_silent = false;
  // Within the initial smoothing interval; reported but never scored.
  bool warmup = false;
  // Final chunk shorter than frames_per_chunk.
  bool partial = false;

  bool operator==(const WindDecision&) const = default;
};

// Conjunctive threshold test on one chunk's scores.
bool ConjunctiveDecision(double ssc_score, double mc_score,
                         double ssc_threshold, double mc_threshold);

// The reported decision changes only after `length` consecutive raw decisions
// that disagree with it. length <= 1 disables the hysteresis.
class Hysteresis {
 public:
  explicit Hysteresis(int length = 2) : length_(length) {}

  bool Update(bool raw);
  bool state() const { return state_; }

 private:
  int length_;
  bool state_ = false;
  int disagreeing_ = 0;
};

// Fills wind_present from the scores and the hysteresis.
WindDecision Classify(double ssc_score, double mc_score,
                      const DetectorConfig& config, Hysteresis& hysteresis);

// Streaming detector state. Single writer: feed frames in order.
class WindDetector {
 public:
  WindDetector(const DetectorConfig& config, const Framing& framing,
               std::size_t num_channels);

  // `spectra` holds one num_bins spectrum per channel. Returns the decision
  // when this frame completes a chunk.
  std::optional<WindDecision> PushFrame(
      std::span<const std::span<const std::complex<double>>> spectra);
  // Closes a trailing partial chunk, if any.
  std::optional<WindDecision> Flush();

  const DetectorConfig& config() const { return config_; }
  const CrossSpectra& psd() const { return psd_; }
  std::size_t frames_processed() const { return frames_; }
  std::size_t warmup_chunks() const { return warmup_chunks_; }

 private:
  WindDecision EndChunk(bool partial);

  DetectorConfig config_;
  Framing framing_;
  BinRange mc_band_;
  std::size_t warmup_chunks_;
  CrossSpectra psd_;
  std::vector<MovingAverage> ssc_history_;
  MovingAverage mc_history_;
  Hysteresis hysteresis_;
  std::size_t frames_ = 0;
  std::size_t frames_in_chunk_ = 0;
  std::size_t chunk_index_ = 0;
  double last_ssc_ = 0.0;
  double last_ssc_raw_ = 0.0;
  double last_mc_ = 0.0;
  bool last_mc_silent_ = true;
};

// Chunks whose start lies inside the initial smoothing interval.
std::size_t WarmupChunks(const DetectorConfig& config, const Framing& framing);

// Offline path: pads the tail like the streaming harness, analyses the whole
// signal and returns one decision per chunk. Needs >= 2 channels.
std::vector<WindDecision> DetectBatch(const MultiChannelAudio& audio,
                                      const DetectorConfig& config,
                                      const Framing& framing);

// Re-derives scores and decisions from a recorded trace for another set of
// thresholds and transform width, reproducing what DetectBatch would output.
std::vector<WindDecision> ReplayDecisions(std::span<const WindDecision> trace,
                                          const DetectorConfig& config);

}  // namespace windguard

#endif  // WINDGUARD_DETECTOR_H_
