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

#include "windguard/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "windguard/errors.h"

namespace windguard {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  true_positive += o.true_positive;
  false_positive += o.false_positive;
  true_negative += o.true_negative;
  false_negative += o.false_negative;
  return *this;
}

namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double Accuracy(const ConfusionCounts& c) {
  return Ratio(c.true_positive + c.true_negative, c.total());
}
double TruePositiveRate(const ConfusionCounts& c) {
  return Ratio(c.true_positive, c.true_positive + c.false_negative);
}
double TrueNegativeRate(const ConfusionCounts& c) {
  return Ratio(c.true_negative, c.true_negative + c.false_positive);
}
double FalsePositiveRate(const ConfusionCounts& c) {
  return Ratio(c.false_positive, c.true_negative + c.false_positive);
}
double FalseNegativeRate(const ConfusionCounts& c) {
  return Ratio(c.false_negative, c.true_positive + c.false_negative);
}
double BalancedAccuracy(const ConfusionCounts& c) {
  const bool has_pos = c.true_positive + c.false_negative > 0;
  const bool has_neg = c.true_negative + c.false_positive > 0;
  if (has_pos && has_neg) return 0.5 * (TruePositiveRate(c) + TrueNegativeRate(c));
  if (has_pos) return TruePositiveRate(c);
  if (has_neg) return TrueNegativeRate(c);
  return 0.0;
}

DetectionReport DetectionMetrics(std::span<const WindDecision> decisions,
                                 const std::vector<bool>& truth) {
  if (decisions.size() != truth.size()) {
    throw DataError("decision stream has " + std::to_string(decisions.size()) +
                    " chunks, truth has " + std::to_string(truth.size()));
  }
  DetectionReport r;
  r.trace.assign(decisions.begin(), decisions.end());
  r.truth = truth;
  bool in_event = false;
  bool event_hit = false;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const bool label = truth[i];
    const WindDecision& d = decisions[i];
    if (label && !in_event) {
      ++r.gust_events;
      event_hit = false;
    }
    if (!label && in_event && event_hit) ++r.gust_events_detected;
    in_event = label;
    if (d.warmup) {
      ++r.warmup_chunks;
      continue;
    }
    if (label && d.wind_present) event_hit = true;
    if (label) {
      ++(d.wind_present ? r.counts.true_positive : r.counts.false_negative);
    } else {
      ++(d.wind_present ? r.counts.false_positive : r.counts.true_negative);
    }
  }
  if (in_event && event_hit) ++r.gust_events_detected;
  return r;
}

DetectionReport MergeReports(std::span<const DetectionReport> reports) {
  DetectionReport out;
  for (const DetectionReport& r : reports) {
    out.counts += r.counts;
    out.warmup_chunks += r.warmup_chunks;
    out.gust_events += r.gust_events;
    out.gust_events_detected += r.gust_events_detected;
  }
  return out;
}

BinRange FullBand(const Framing& framing) { return {0, framing.num_bins() - 1}; }

BinRange BandBelow(double hz, const Framing& framing) {
  const int count = static_cast<int>(std::ceil(hz / framing.bin_hz() - 1e-12));
  if (count < 1) throw ConfigError("band below " + std::to_string(hz) + " Hz is empty");
  return {0, std::min(count, framing.num_bins()) - 1};
}

double LogSpectralDistance(const StftGrid& a, const StftGrid& b, BinRange band) {
  if (!(a.framing == b.framing) || a.num_frames() != b.num_frames() ||
      a.num_channels() != b.num_channels()) {
    throw DataError("log-spectral distance needs grids with identical framing");
  }
  if (band.first < 0 || band.last >= a.framing.num_bins() || band.last < band.first) {
    throw DataError("band lies outside the spectrum");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < a.num_channels(); ++c) {
    for (std::size_t t = 0; t < a.num_frames(); ++t) {
      const auto ra = a.channels[c].row(t);
      const auto rb = b.channels[c].row(t);
      for (int k = band.first; k <= band.last; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double d = 10.0 * std::log10((std::norm(ra[kk]) + kLogPowerFloor) /
                                           (std::norm(rb[kk]) + kLogPowerFloor));
        sum += d * d;
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(count));
}

double SegmentalSnr(std::span<const double> clean, std::span<const double> estimate,
                    const Framing& framing) {
  if (clean.size() != estimate.size()) throw DataError("signals differ in length");
  const auto frame = static_cast<std::size_t>(framing.frame_len);
  const auto hop = static_cast<std::size_t>(framing.hop);
  double sum = 0.0;
  std::size_t frames = 0;
  for (std::size_t start = 0; start + frame <= clean.size(); start += hop) {
    double signal = 0.0;
    double noise = 0.0;
    for (std::size_t i = start; i < start + frame; ++i) {
      signal += clean[i] * clean[i];
      const double e = clean[i] - estimate[i];
      noise += e * e;
    }
    const double snr = 10.0 * std::log10((signal + 1e-20) / (noise + 1e-20));
    sum += std::clamp(snr, -10.0, 35.0);
    ++frames;
  }
  return frames == 0 ? 0.0 : sum / static_cast<double>(frames);
}

namespace {

MultiChannelAudio Channel(const MultiChannelAudio& audio, std::size_t c) {
  MultiChannelAudio out(1, 0, audio.sample_rate);
  out.channels[0] = audio.channels.at(c);
  return out;
}

}  // namespace

ReconReport EvaluateReconstruction(const MultiChannelAudio& clean,
                                   const MultiChannelAudio& noisy,
                                   const MultiChannelAudio& reconstructed,
                                   const Framing& framing, double cutoff_hz) {
  if (clean.num_samples() != noisy.num_samples() ||
      clean.num_samples() != reconstructed.num_samples()) {
    throw DataError("clean, noisy and reconstructed signals differ in length");
  }
  const StftGrid clean_grid = Stft(Channel(clean, 0), framing);
  const StftGrid noisy_grid = Stft(Channel(noisy, 0), framing);
  const StftGrid recon_grid = Stft(Channel(reconstructed, 0), framing);
  const BinRange low = BandBelow(cutoff_hz, framing);
  const BinRange full = FullBand(framing);
  ReconReport r;
  r.inband_noisy_db = LogSpectralDistance(noisy_grid, clean_grid, low);
  r.inband_recon_db = LogSpectralDistance(recon_grid, clean_grid, low);
  r.fullband_noisy_db = LogSpectralDistance(noisy_grid, clean_grid, full);
  r.fullband_recon_db = LogSpectralDistance(recon_grid, clean_grid, full);
  r.segsnr_noisy_db = SegmentalSnr(clean.channels[0], noisy.channels[0], framing);
  r.segsnr_recon_db =
      SegmentalSnr(clean.channels[0], reconstructed.channels[0], framing);
  return r;
}

ScoredScene ScoreScene(const LabeledScene& scene, const DetectorConfig& config,
                       const Framing& framing) {
  ScoredScene s;
  s.trace = DetectBatch(scene.audio, config, framing);
  s.labels = scene.chunk_labels;
  if (s.trace.size() != s.labels.size()) {
    throw DataError("scene labels do not match the detector's chunk grid");
  }
  return s;
}

DetectorConfig ApplyCalibration(const DetectorConfig& base,
                                const CalibrationPoint& point) {
  DetectorConfig out = base;
  out.ssc.ssc_threshold = point.ssc_threshold;
  out.coherence.mc_threshold = point.mc_threshold;
  out.ssc.transform_sigma = point.transform_sigma;
  return out;
}

CalibrationPoint Calibrate(const CalibrationGrid& grid,
                           std::span<const ScoredScene> corpus,
                           const DetectorConfig& base) {
  if (corpus.empty()) throw DataError("calibration corpus is empty");
  if (grid.ssc_thresholds.empty() || grid.mc_thresholds.empty() ||
      grid.transform_sigmas.empty()) {
    throw ConfigError("calibration grid is empty");
  }
  for (const ScoredScene& s : corpus) {
    if (s.trace.size() != s.labels.size()) {
      throw DataError("scored scene has mismatched trace and labels");
    }
  }
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto sigmas = sorted(grid.transform_sigmas);
  const auto sscs = sorted(grid.ssc_thresholds);
  const auto mcs = sorted(grid.mc_thresholds);

  bool have = false;
  CalibrationPoint best;
  for (double sigma : sigmas) {
    for (double ssc : sscs) {
      for (double mc : mcs) {
        DetectorConfig cfg = base;
        cfg.ssc.transform_sigma = sigma;
        cfg.ssc.ssc_threshold = ssc;
        cfg.coherence.mc_threshold = mc;
        ConfusionCounts counts;
        for (const ScoredScene& s : corpus) {
          counts += DetectionMetrics(ReplayDecisions(s.trace, cfg), s.labels).counts;
        }
        const CalibrationPoint p{ssc, mc, sigma, BalancedAccuracy(counts),
                                 FalsePositiveRate(counts)};
        // Higher accuracy, then lower FPR, ssc, mc, sigma.
        const auto key = [](const CalibrationPoint& q) {
          return std::make_tuple(-q.balanced_accuracy, q.false_positive_rate,
                                 q.ssc_threshold, q.mc_threshold, q.transform_sigma);
        };
        if (!have || key(p) < key(best)) {
          best = p;
          have = true;
        }
      }
    }
  }
  return best;
}

CalibrationPoint Calibrate(const CalibrationGrid& grid,
                           std::span<const LabeledScene> corpus,
                           const DetectorConfig& base, const Framing& framing) {
  if (corpus.empty()) throw DataError("calibration corpus is empty");
  std::vector<ScoredScene> scored;
  scored.reserve(corpus.size());
  for (const LabeledScene& scene : corpus) {
    scored.push_back(ScoreScene(scene, base, framing));
  }
  return Calibrate(grid, scored, base);
}

std::vector<double> Linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(count - 1));
  }
  return out;
}

nlohmann::json ToJson(const WindDecision& d) {
  return {{"chunk_index", d.chunk_index}, {"first_frame", d.first_frame},
          {"num_frames", d.num_frames},   {"t_start_ms", d.t_start_ms},
          {"wind", d.wind_present},       {"ssc_score", d.ssc_score},
          {"mc_score", d.mc_score},       {"ssc_raw", d.ssc_raw},
          {"mc_silent", d.mc_silent},     {"warmup", d.warmup},
          {"partial", d.partial}};
}

WindDecision WindDecisionFromJson(const nlohmann::json& j) {
  WindDecision d;
  d.chunk_index = j.at("chunk_index").get<std::size_t>();
  d.first_frame = j.at("first_frame").get<std::size_t>();
  d.num_frames = j.at("num_frames").get<std::size_t>();
  d.t_start_ms = j.at("t_start_ms").get<double>();
  d.wind_present = j.at("wind").get<bool>();
  d.ssc_score = j.at("ssc_score").get<double>();
  d.mc_score = j.at("mc_score").get<double>();
  d.ssc_raw = j.at("ssc_raw").get<double>();
  d.mc_silent = j.at("mc_silent").get<bool>();
  d.warmup = j.at("warmup").get<bool>();
  d.partial = j.at("partial").get<bool>();
  return d;
}

nlohmann::json ToJson(const DetectionReport& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const WindDecision& d : r.trace) trace.push_back(ToJson(d));
  return {{"counts",
           {{"tp", r.counts.true_positive},
            {"fp", r.counts.false_positive},
            {"tn", r.counts.true_negative},
            {"fn", r.counts.false_negative}}},
          {"warmup_chunks", r.warmup_chunks},
          {"accuracy", r.accuracy()},
          {"balanced_accuracy", r.balanced_accuracy()},
          {"false_positive_rate", r.false_positive_rate()},
          {"false_negative_rate", r.false_negative_rate()},
          {"gust_events", r.gust_events},
          {"gust_events_detected", r.gust_events_detected},
          {"truth", r.truth},
          {"trace", trace}};
}

DetectionReport DetectionReportFromJson(const nlohmann::json& j) {
  DetectionReport r;
  const auto& c = j.at("counts");
  r.counts.true_positive = c.at("tp").get<std::size_t>();
  r.counts.false_positive = c.at("fp").get<std::size_t>();
  r.counts.true_negative = c.at("tn").get<std::size_t>();
  r.counts.false_negative = c.at("fn").get<std::size_t>();
  r.warmup_chunks = j.at("warmup_chunks").get<std::size_t>();
  r.gust_events = j.at("gust_events").get<std::size_t>();
  r.gust_events_detected = j.at("gust_events_detected").get<std::size_t>();
  r.truth = j.at("truth").get<std::vector<bool>>();
  for (const auto& d : j.at("trace")) r.trace.push_back(WindDecisionFromJson(d));
  return r;
}

nlohmann::json ToJson(const ReconReport& r) {
  return {{"inband_noisy_db", r.inband_noisy_db},
          {"inband_recon_db", r.inband_recon_db},
          {"fullband_noisy_db", r.fullband_noisy_db},
          {"fullband_recon_db", r.fullband_recon_db},
          {"segsnr_noisy_db", r.segsnr_noisy_db},
          {"segsnr_recon_db", r.segsnr_recon_db},
          {"segsnr_gain_db", r.segsnr_gain_db()}};
}

ReconReport ReconReportFromJson(const nlohmann::json& j) {
  ReconReport r;
  r.inband_noisy_db = j.at("inband_noisy_db").get<double>();
  r.inband_recon_db = j.at("inband_recon_db").get<double>();
  r.fullband_noisy_db = j.at("fullband_noisy_db").get<double>();
  r.fullband_recon_db = j.at("fullband_recon_db").get<double>();
  r.segsnr_noisy_db = j.at("segsnr_noisy_db").get<double>();
  r.segsnr_recon_db = j.at("segsnr_recon_db").get<double>();
  return r;
}

nlohmann::json ToJson(const CalibrationPoint& p) {
  return {{"ssc_threshold", p.ssc_threshold},
          {"mc_threshold", p.mc_threshold},
          {"transform_sigma", p.transform_sigma},
          {"balanced_accuracy", p.balanced_accuracy},
          {"false_positive_rate", p.false_positive_rate}};
}

CalibrationPoint CalibrationPointFromJson(const nlohmann::json& j) {
  CalibrationPoint p;
  p.ssc_threshold = j.at("ssc_threshold").get<double>();
  p.mc_threshold = j.at("mc_threshold").get<double>();
  p.transform_sigma = j.at("transform_sigma").get<double>();
  p.balanced_accuracy = j.at("balanced_accuracy").get<double>();
  p.false_positive_rate = j.at("false_positive_rate").get<double>();
  return p;
}

void WriteDecisionCsv(std::ostream& out, std::span<const WindDecision> trace) {
  out << "chunk_index,t_start_ms,ssc_score,mc_score,wind,warmup,partial\n";
  char line[256];
  for (const WindDecision& d : trace) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%d,%d,%d\n",
                  d.chunk_index, d.t_start_ms, d.ssc_score, d.mc_score,
                  d.wind_present ? 1 : 0, d.warmup ? 1 : 0, d.partial ? 1 : 0);
    out << line;
  }
}

}  // namespace windguard
