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

#include "windguard/detector.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "windguard/errors.h"
#include "windguard/stft.h"

namespace windguard {

namespace {

bool InOpenUnit(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

DetectorConfig ResolveDetectorConfig(const DetectorConfig& config,
                                     const Framing& framing) {
  DetectorConfig out = config;
  const int bins = framing.num_bins();
  out.ssc.mu2 = std::min(out.ssc.mu2, bins - 1);
  if (out.ssc.mu1 < 0 || out.ssc.mu1 >= out.ssc.mu2) {
    throw ConfigError("ssc: need 0 <= mu1 < mu2 < bin count (mu1 = " +
                      std::to_string(out.ssc.mu1) +
                      ", mu2 = " + std::to_string(out.ssc.mu2) + ")");
  }
  if (!InOpenUnit(out.ssc.ssc_threshold)) {
    throw ConfigError("ssc: threshold must lie in (0, 1)");
  }
  if (!(out.ssc.transform_sigma > 0.0)) {
    throw ConfigError("ssc: transform_sigma must be positive");
  }
  if (!(out.ssc.smooth_ms > 0.0) || !(out.coherence.smooth_ms > 0.0)) {
    throw ConfigError("smooth_ms must be positive");
  }
  if (!InOpenUnit(out.coherence.alpha_s)) {
    throw ConfigError("coherence: alpha_s must lie in (0, 1)");
  }
  if (!InOpenUnit(out.coherence.mc_threshold)) {
    throw ConfigError("coherence: threshold must lie in (0, 1)");
  }
  if (out.coherence_channel_a < 0 || out.coherence_channel_b < 0 ||
      out.coherence_channel_a == out.coherence_channel_b) {
    throw ConfigError("coherence channels must be two distinct indices");
  }
  CoherenceBand(out.coherence, framing);  // throws on an empty band
  return out;
}

BinRange CoherenceBand(const CoherenceConfig& config, const Framing& framing) {
  const double bin_hz = framing.bin_hz();
  BinRange band;
  band.first = std::max(1, static_cast<int>(std::ceil(config.band_low_hz / bin_hz)));
  band.last = std::min(framing.num_bins() - 1,
                       static_cast<int>(std::floor(config.band_high_hz / bin_hz)));
  if (band.last < band.first) {
    throw ConfigError("coherence band [" + std::to_string(config.band_low_hz) +
                      ", " + std::to_string(config.band_high_hz) +
                      "] Hz contains no non-DC bins");
  }
  return band;
}

std::size_t SmoothingFrames(double ms, const Framing& framing) {
  const long frames = std::lround(ms / framing.hop_ms());
  return static_cast<std::size_t>(std::max(1L, frames));
}

std::optional<double> SpectralCentroid(std::span<const double> power, int mu1,
                                       int mu2) {
  double weighted = 0.0;
  double total = 0.0;
  for (int mu = mu1; mu <= mu2; ++mu) {
    weighted += power[static_cast<std::size_t>(mu)] * mu;
    total += power[static_cast<std::size_t>(mu)];
  }
  if (!(total > 0.0)) return std::nullopt;
  return std::clamp(weighted / total, static_cast<double>(mu1),
                    static_cast<double>(mu2));
}

double SscIndicator(double centroid, int mu2) {
  return std::clamp((mu2 - centroid) / mu2, 0.0, 1.0);
}

double FrameSscIndicator(std::span<const std::complex<double>> spectrum,
                         int mu1, int mu2) {
  std::vector<double> power(static_cast<std::size_t>(mu2) + 1, 0.0);
  for (int mu = mu1; mu <= mu2; ++mu) {
    power[static_cast<std::size_t>(mu)] = std::norm(spectrum[static_cast<std::size_t>(mu)]);
  }
  const auto centroid = SpectralCentroid(power, mu1, mu2);
  return centroid ? SscIndicator(*centroid, mu2) : 0.0;
}

double InverseGaussianTransform(double value, double sigma) {
  return 1.0 - std::exp(-(value * value) / (2.0 * sigma * sigma));
}

double ChannelMax(std::span<const double> scores) {
  double best = 0.0;
  for (double s : scores) best = std::max(best, s);
  return best;
}

std::vector<double> ChannelMax(const std::vector<std::vector<double>>& streams) {
  if (streams.empty()) return {};
  std::vector<double> out = streams.front();
  for (const auto& s : streams) {
    if (s.size() != out.size()) throw DataError("score streams differ in length");
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::max(out[i], s[i]);
  }
  return out;
}

MovingAverage::MovingAverage(std::size_t capacity)
    : values_(std::max<std::size_t>(capacity, 1), 0.0) {}

double MovingAverage::Push(double value) {
  values_[next_] = value;
  next_ = (next_ + 1) % values_.size();
  count_ = std::min(count_ + 1, values_.size());
  return mean();
}

double MovingAverage::mean() const {
  if (count_ == 0) return 0.0;
  // Summed oldest-first so the result depends only on the window contents.
  double sum = 0.0;
  const std::size_t cap = values_.size();
  const std::size_t start = (next_ + cap - count_) % cap;
  for (std::size_t i = 0; i < count_; ++i) sum += values_[(start + i) % cap];
  return sum / static_cast<double>(count_);
}

std::vector<double> SmoothAndTransform(std::span<const double> raw,
                                       const SscConfig& config,
                                       MovingAverage& history) {
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) {
    out.push_back(InverseGaussianTransform(history.Push(v), config.transform_sigma));
  }
  return out;
}

void PsdUpdate(CrossSpectra& psd, std::span<const std::complex<double>> x_a,
               std::span<const std::complex<double>> x_b, double alpha_s) {
  const double beta = 1.0 - alpha_s;
  for (std::size_t k = 0; k < psd.num_bins(); ++k) {
    psd.auto_a[k] = alpha_s * psd.auto_a[k] + beta * std::norm(x_a[k]);
    psd.auto_b[k] = alpha_s * psd.auto_b[k] + beta * std::norm(x_b[k]);
    psd.cross[k] = alpha_s * psd.cross[k] + beta * (x_a[k] * std::conj(x_b[k]));
  }
}

std::optional<double> MagnitudeCoherence(const CrossSpectra& psd,
                                         std::size_t bin) {
  const double paa = psd.auto_a[bin];
  const double pbb = psd.auto_b[bin];
  if (!(paa > kPsdFloor) || !(pbb > kPsdFloor)) return std::nullopt;
  return std::min(1.0, std::abs(psd.cross[bin]) / std::sqrt(paa * pbb));
}

BandCoherenceResult BandCoherence(const CrossSpectra& psd, BinRange band) {
  double sum = 0.0;
  int used = 0;
  for (int mu = band.first; mu <= band.last; ++mu) {
    if (const auto mc = MagnitudeCoherence(psd, static_cast<std::size_t>(mu))) {
      sum += *mc;
      ++used;
    }
  }
  if (used == 0) return {0.0, true};
  return {sum / used, false};
}

bool ConjunctiveDecision(double ssc_score, double mc_score,
                         double ssc_threshold, double mc_threshold) {
  return ssc_score >= ssc_threshold && mc_score <= mc_threshold;
}

bool Hysteresis::Update(bool raw) {
  if (raw == state_) {
    disagreeing_ = 0;
  } else if (++disagreeing_ >= std::max(length_, 1)) {
    state_ = raw;
    disagreeing_ = 0;
  }
  return state_;
}

WindDecision Classify(double ssc_score, double mc_score,
                      const DetectorConfig& config, Hysteresis& hysteresis) {
  WindDecision d;
  d.ssc_score = ssc_score;
  d.mc_score = mc_score;
  d.wind_present = hysteresis.Update(
      ConjunctiveDecision(ssc_score, mc_score, config.ssc.ssc_threshold,
                          config.coherence.mc_threshold));
  return d;
}

std::size_t WarmupChunks(const DetectorConfig& config, const Framing& framing) {
  const double smooth = std::max(config.ssc.smooth_ms, config.coherence.smooth_ms);
  const double chunk_ms = 1000.0 * framing.chunk_len() / framing.sample_rate;
  return static_cast<std::size_t>(std::ceil(smooth / chunk_ms - 1e-9));
}

WindDetector::WindDetector(const DetectorConfig& config, const Framing& framing,
                           std::size_t num_channels)
    : config_(ResolveDetectorConfig(config, framing)),
      framing_(framing),
      mc_band_(CoherenceBand(config_.coherence, framing)),
      warmup_chunks_(WarmupChunks(config_, framing)),
      psd_(static_cast<std::size_t>(framing.num_bins())),
      ssc_history_(num_channels,
                   MovingAverage(SmoothingFrames(config_.ssc.smooth_ms, framing))),
      mc_history_(SmoothingFrames(config_.coherence.smooth_ms, framing)),
      hysteresis_(config_.hysteresis_chunks) {
  const auto needed = static_cast<std::size_t>(
      std::max(config_.coherence_channel_a, config_.coherence_channel_b));
  if (num_channels < 2 || needed >= num_channels) {
    throw DataError("detector needs the two coherence channels to exist (have " +
                    std::to_string(num_channels) + ")");
  }
}

std::optional<WindDecision> WindDetector::PushFrame(
    std::span<const std::span<const std::complex<double>>> spectra) {
  if (spectra.size() != ssc_history_.size()) {
    throw DataError("frame channel count does not match the detector");
  }
  double best = 0.0;
  double best_raw = 0.0;
  for (std::size_t c = 0; c < spectra.size(); ++c) {
    const double indicator =
        FrameSscIndicator(spectra[c], config_.ssc.mu1, config_.ssc.mu2);
    const double smoothed = ssc_history_[c].Push(indicator);
    const double score =
        InverseGaussianTransform(smoothed, config_.ssc.transform_sigma);
    best = std::max(best, score);
    best_raw = std::max(best_raw, smoothed);
  }
  last_ssc_ = best;
  last_ssc_raw_ = best_raw;

  PsdUpdate(psd_, spectra[static_cast<std::size_t>(config_.coherence_channel_a)],
            spectra[static_cast<std::size_t>(config_.coherence_channel_b)],
            config_.coherence.alpha_s);
  const BandCoherenceResult mc = BandCoherence(psd_, mc_band_);
  last_mc_ = mc_history_.Push(mc.mean);
  last_mc_silent_ = mc.silent;

  ++frames_;
  if (++frames_in_chunk_ == static_cast<std::size_t>(framing_.frames_per_chunk)) {
    return EndChunk(/*partial=*/false);
  }
  return std::nullopt;
}

std::optional<WindDecision> WindDetector::Flush() {
  if (frames_in_chunk_ == 0) return std::nullopt;
  return EndChunk(/*partial=*/true);
}

WindDecision WindDetector::EndChunk(bool partial) {
  WindDecision d;
  const bool warmup = chunk_index_ < warmup_chunks_;
  if (warmup) {
    d.ssc_score = last_ssc_;
    d.mc_score = last_mc_;
  } else {
    d = Classify(last_ssc_, last_mc_, config_, hysteresis_);
  }
  d.chunk_index = chunk_index_;
  d.num_frames = frames_in_chunk_;
  d.first_frame = frames_ - frames_in_chunk_;
  d.t_start_ms = 1000.0 * static_cast<double>(d.first_frame) * framing_.hop /
                 framing_.sample_rate;
  d.ssc_raw = last_ssc_raw_;
  d.mc_silent = last_mc_silent_;
  d.warmup = warmup;
  d.partial = partial;
  ++chunk_index_;
  frames_in_chunk_ = 0;
  return d;
}

std::vector<WindDecision> DetectBatch(const MultiChannelAudio& audio,
                                      const DetectorConfig& config,
                                      const Framing& framing) {
  audio.RequireChannels(2);
  WindDetector detector(config, framing, audio.num_channels());
  std::vector<WindDecision> out;
  if (audio.num_samples() == 0) return out;

  MultiChannelAudio padded = audio;
  for (auto& ch : padded.channels) {
    ch.resize(StreamPaddedLength(audio.num_samples(), framing), 0.0);
  }
  const StftGrid grid = Stft(padded, framing);
  std::vector<std::span<const std::complex<double>>> frame(grid.num_channels());
  for (std::size_t t = 0; t < grid.num_frames(); ++t) {
    for (std::size_t c = 0; c < grid.num_channels(); ++c) {
      frame[c] = grid.channels[c].row(t);
    }
    if (auto d = detector.PushFrame(frame)) out.push_back(*d);
  }
  if (auto d = detector.Flush()) out.push_back(*d);
  return out;
}

std::vector<WindDecision> ReplayDecisions(std::span<const WindDecision> trace,
                                          const DetectorConfig& config) {
  Hysteresis hysteresis(config.hysteresis_chunks);
  std::vector<WindDecision> out;
  out.reserve(trace.size());
  for (const WindDecision& in : trace) {
    WindDecision d = in;
    d.ssc_score = InverseGaussianTransform(in.ssc_raw, config.ssc.transform_sigma);
    d.wind_present = false;
    if (!in.warmup) {
      d.wind_present = hysteresis.Update(
          ConjunctiveDecision(d.ssc_score, d.mc_score, config.ssc.ssc_threshold,
                              config.coherence.mc_threshold));
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace windguard
