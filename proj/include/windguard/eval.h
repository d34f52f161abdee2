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

#ifndef WINDGUARD_EVAL_H_
#define WINDGUARD_EVAL_H_

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "windguard/detector.h"
#include "windguard/stft.h"
#include "windguard/synth.h"

namespace windguard {

struct ConfusionCounts {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;

  std::size_t total() const {
    return true_positive + false_positive + true_negative + false_negative;
  }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// Rates derived from counts. With no positives the balanced accuracy is the
// true-negative rate, with no negatives the true-positive rate.
double Accuracy(const ConfusionCounts& c);
double TruePositiveRate(const ConfusionCounts& c);
double TrueNegativeRate(const ConfusionCounts& c);
double FalsePositiveRate(const ConfusionCounts& c);
double FalseNegativeRate(const ConfusionCounts& c);
double BalancedAccuracy(const ConfusionCounts& c);

struct DetectionReport {
  ConfusionCounts counts;
  std::size_t warmup_chunks = 0;
  // A gust event is a maximal run of wind-labelled chunks; it counts as
  // detected when any scored chunk in the run is declared windy.
  std::size_t gust_events = 0;
  std::size_t gust_events_detected = 0;
  std::vector<WindDecision> trace;
  std::vector<bool> truth;

  double accuracy() const { return Accuracy(counts); }
  double balanced_accuracy() const { return BalancedAccuracy(counts); }
  double false_positive_rate() const { return FalsePositiveRate(counts); }
  double false_negative_rate() const { return FalseNegativeRate(counts); }

  bool operator==(const DetectionReport&) const = default;
};

// Per-chunk confusion accounting; warm-up chunks are counted separately and
// left out of the confusion counts. Throws DataError on a length mismatch.
DetectionReport DetectionMetrics(std::span<const WindDecision> decisions,
                                 const std::vector<bool>& truth);

// Pools counts and events; traces are dropped. Order-independent.
DetectionReport MergeReports(std::span<const DetectionReport> reports);

// Inclusive bin range helpers for spectral distances.
BinRange FullBand(const Framing& framing);
// Bins whose centre frequency is below `hz`.
BinRange BandBelow(double hz, const Framing& framing);

// RMS over frames and band bins of 10 log10(|a|^2 / |b|^2), both floored by
// kLogPowerFloor. Channels are compared pairwise and pooled. Throws DataError
// when framing or shape differ.
double LogSpectralDistance(const StftGrid& a, const StftGrid& b, BinRange band);

// Mean over frames of 10 log10(sum clean^2 / sum (clean - estimate)^2),
// each frame clamped to [-10, 35] dB.
double SegmentalSnr(std::span<const double> clean, std::span<const double> estimate,
                    const Framing& framing);

struct ReconReport {
  double inband_noisy_db = 0.0;
  double inband_recon_db = 0.0;
  double fullband_noisy_db = 0.0;
  double fullband_recon_db = 0.0;
  double segsnr_noisy_db = 0.0;
  double segsnr_recon_db = 0.0;

  double segsnr_gain_db() const { return segsnr_recon_db - segsnr_noisy_db; }
  bool operator==(const ReconReport&) const = default;
};

// Compares the reference channel of `noisy` and the one-channel
// `reconstructed` against `clean`, in-band meaning below `cutoff_hz`.
ReconReport EvaluateReconstruction(const MultiChannelAudio& clean,
                                   const MultiChannelAudio& noisy,
                                   const MultiChannelAudio& reconstructed,
                                   const Framing& framing, double cutoff_hz);

// Calibration -------------------------------------------------------------

struct CalibrationGrid {
  std::vector<double> ssc_thresholds;
  std::vector<double> mc_thresholds;
  std::vector<double> transform_sigmas;
};

struct CalibrationPoint {
  double ssc_threshold = 0.0;
  double mc_threshold = 0.0;
  double transform_sigma = 0.0;
  double balanced_accuracy = 0.0;
  double false_positive_rate = 0.0;

  bool operator==(const CalibrationPoint&) const = default;
};

// A scene's detector trace together with its chunk truth.
struct ScoredScene {
  std::vector<WindDecision> trace;
  std::vector<bool> labels;
};

ScoredScene ScoreScene(const LabeledScene& scene, const DetectorConfig& config,
                       const Framing& framing);

// Exhaustive search for the grid point with the highest pooled balanced
// accuracy; ties go to the lower false-positive rate, then the lower SSC
// threshold, then the lower MC threshold, then the lower sigma. Decisions are
// replayed from the recorded traces with `base`'s hysteresis. Throws
// DataError for an empty corpus and ConfigError for an empty grid.
CalibrationPoint Calibrate(const CalibrationGrid& grid,
                           std::span<const ScoredScene> corpus,
                           const DetectorConfig& base);
CalibrationPoint Calibrate(const CalibrationGrid& grid,
                           std::span<const LabeledScene> corpus,
                           const DetectorConfig& base, const Framing& framing);

// Detector config with the calibrated thresholds and sigma applied.
DetectorConfig ApplyCalibration(const DetectorConfig& base,
                                const CalibrationPoint& point);

// Uniform grid of `count` values over [lo, hi].
std::vector<double> Linspace(double lo, double hi, std::size_t count);

// Serialization --------------------------------------------------------------

nlohmann::json ToJson(const WindDecision& d);
WindDecision WindDecisionFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const DetectionReport& r);
DetectionReport DetectionReportFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ReconReport& r);
ReconReport ReconReportFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const CalibrationPoint& p);
CalibrationPoint CalibrationPointFromJson(const nlohmann::json& j);

// Decision trace CSV: chunk_index,t_start_ms,ssc_score,mc_score,wind followed
// by the warmup and partial flags.
void WriteDecisionCsv(std::ostream& out, std::span<const WindDecision> trace);

}  // namespace windguard

#endif  // WINDGUARD_EVAL_H_
