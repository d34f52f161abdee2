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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "test_util.h"
#include "windguard/detector.h"
#include "windguard/eval.h"
#include "windguard/model_io.h"
#include "windguard/nn.h"
#include "windguard/stft.h"
#include "windguard/stream.h"
#include "windguard/suppressor.h"
#include "windguard/synth.h"

namespace wg = windguard;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [failed]");
  }
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

const wg::Framing& DefaultFraming() {
  static const wg::Framing f = wg::ResolveFraming({}, wg::kDefaultSampleRate);
  return f;
}

wg::DetectionReport EvaluateDetection(const std::vector<wg::SceneSpec>& specs,
                                      const wg::DetectorConfig& config,
                                      int occluded_channel = -1) {
  std::vector<wg::DetectionReport> reports;
  for (const wg::SceneSpec& spec : specs) {
    wg::LabeledScene scene = wg::MixScene(spec);
    if (occluded_channel >= 0) {
      auto& ch = scene.audio.channels[static_cast<std::size_t>(occluded_channel)];
      std::fill(ch.begin(), ch.end(), 0.0);
    }
    const auto trace = wg::DetectBatch(scene.audio, config, DefaultFraming());
    reports.push_back(wg::DetectionMetrics(trace, scene.chunk_labels));
  }
  return wg::MergeReports(reports);
}

// Shared between criteria 1 and 2.
wg::DetectorConfig calibrated;
std::vector<wg::SceneSpec> high_scenes;
double high_accuracy = 0.0;

Outcome DetectionAccuracy() {
  Outcome o;
  const auto start = Clock::now();
  std::vector<wg::LabeledScene> tuning;
  for (wg::WindLevel level : {wg::WindLevel::kLow, wg::WindLevel::kMedium, wg::WindLevel::kHigh}) {
    for (const wg::SceneSpec& spec : wg::TransitionCorpus(level, 4, 60.0, 777)) {
      tuning.push_back(wg::MixScene(spec));
    }
  }
  const wg::DetectorConfig base = wg::ResolveDetectorConfig({}, DefaultFraming());
  const wg::CalibrationGrid grid{wg::Linspace(0.3, 0.95, 27), wg::Linspace(0.5, 0.98, 25),
                                 {0.25, 0.35, 0.5}};
  const wg::CalibrationPoint point = wg::Calibrate(grid, tuning, base, DefaultFraming());
  calibrated = wg::ApplyCalibration(base, point);
  tuning.clear();

  const wg::DetectionReport low =
      EvaluateDetection(wg::TransitionCorpus(wg::WindLevel::kLow, 50, 60.0, 2024), calibrated);
  high_scenes = wg::TransitionCorpus(wg::WindLevel::kHigh, 50, 60.0, 2024);
  const wg::DetectionReport high = EvaluateDetection(high_scenes, calibrated);
  high_accuracy = high.balanced_accuracy();
  const double elapsed = Seconds(start);

  o.Check(true, Fmt("calibrated ssc %.3g mc %.3g sigma %.3g", point.ssc_threshold,
                    point.mc_threshold, point.transform_sigma));
  o.Check(low.balanced_accuracy() >= 0.90, Fmt("low BA %.4f >= 0.90", low.balanced_accuracy()));
  o.Check(high_accuracy >= 0.99, Fmt("high BA %.4f >= 0.99", high_accuracy));
  o.Check(elapsed < 180.0, Fmt("%.1f s < 180 s", elapsed));
  return o;
}

Outcome OcclusionRobustness() {
  Outcome o;
  for (int channel : {0, 1}) {
    const double occluded = EvaluateDetection(high_scenes, calibrated, channel).balanced_accuracy();
    o.Check(high_accuracy - occluded <= 0.05,
            Fmt("channel %.0f zeroed: BA %.4f (drop %.4f <= 0.05)", channel, occluded,
                high_accuracy - occluded));
  }
  return o;
}

// Shared with criterion 4.
wg::NnModel trained;

Outcome SuppressionQuality() {
  Outcome o;
  const auto start = Clock::now();
  std::vector<wg::TrainingPair> pairs;
  double seconds = 0.0;
  for (const wg::SceneSpec& spec : wg::TrainingCorpus(300.0, 30.0, 1)) {
    const wg::LabeledScene s = wg::MixScene(spec);
    seconds += s.audio.duration_s();
    pairs.push_back(wg::MakeTrainingPair(s.audio, s.clean, DefaultFraming()));
  }
  const wg::SuppressorTrainingResult result =
      wg::TrainSuppressor(pairs, wg::ContextSpec{}, wg::AttentiveRegion{}, wg::TrainingSettings{});
  pairs.clear();
  trained = result.model;
  const double train_s = Seconds(start);

  double in_noisy = 0.0, in_recon = 0.0, full_noisy = 0.0, full_recon = 0.0;
  const int kScenes = 20;
  for (int i = 0; i < kScenes; ++i) {
    wg::SceneSpec spec;
    spec.duration_s = 10.0;
    spec.wind_level = wg::WindLevel::kMedium;
    spec.gusts = {wg::SteadyGust(spec.duration_s)};
    spec.seed = 900000 + static_cast<std::uint64_t>(i);
    const wg::LabeledScene s = wg::MixScene(spec);
    const wg::ReconReport r = wg::EvaluateReconstruction(
        s.clean, s.audio, wg::Suppress(s.audio, trained), DefaultFraming(),
        trained.region.cutoff_hz);
    in_noisy += r.inband_noisy_db / kScenes;
    in_recon += r.inband_recon_db / kScenes;
    full_noisy += r.fullband_noisy_db / kScenes;
    full_recon += r.fullband_recon_db / kScenes;
  }
  const double elapsed = Seconds(start);
  const double reduction = 1.0 - in_recon / in_noisy;
  o.Check(seconds >= 300.0, Fmt("trained on %.0f s of pairs in %.1f s", seconds, train_s));
  o.Check(reduction >= 0.30,
          Fmt("in-band LSD %.2f -> %.2f dB (%.1f%% lower, need 30%%)", in_noisy, in_recon,
              100.0 * reduction));
  o.Check(full_recon <= full_noisy + 1.0,
          Fmt("full-band LSD %.2f -> %.2f dB", full_noisy, full_recon));
  o.Check(elapsed < 300.0, Fmt("%.1f s < 300 s", elapsed));
  return o;
}

Outcome PassThrough() {
  Outcome o;
  const wg::Framing& f = DefaultFraming();
  const std::size_t frames = 1000;
  const wg::MultiChannelAudio audio =
      wg::testing::RandomAudio(2, static_cast<std::size_t>(f.hop) * (frames + 1), 4);
  const wg::StftGrid noisy = wg::Stft(audio, f);
  const wg::StftGrid recon = wg::AttentiveReconstruct(trained, noisy);
  const std::size_t first = static_cast<std::size_t>(trained.region.NumBins(f));
  std::size_t mismatched = 0;
  std::size_t changed_below = 0;
  for (std::size_t t = 0; t < noisy.num_frames(); ++t) {
    const auto a = noisy.channels[0].row(t);
    const auto b = recon.channels[0].row(t);
    for (std::size_t k = first; k < a.size(); ++k) {
      if (std::memcmp(&a[k], &b[k], sizeof(a[k])) != 0) ++mismatched;
    }
    for (std::size_t k = 0; k < first; ++k) changed_below += a[k] != b[k];
  }
  o.Check(noisy.num_frames() == frames, Fmt("%.0f frames", static_cast<double>(noisy.num_frames())));
  o.Check(mismatched == 0, Fmt("%.0f pass-through bins differ", static_cast<double>(mismatched)));
  o.Check(changed_below > 0, Fmt("%.0f attentive bins rewritten", static_cast<double>(changed_below)));
  return o;
}

Outcome NumericalSuites() {
  Outcome o;
  const wg::Framing& f = DefaultFraming();

  double worst_rt = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const wg::MultiChannelAudio a = wg::testing::RandomAudio(2, 16000 + seed * 77, seed);
    const wg::StftGrid g = wg::Stft(a, f);
    const wg::MultiChannelAudio back = wg::Istft(g);
    const auto [lo, hi] = wg::InteriorSamples(f, g.num_frames());
    for (std::size_t c = 0; c < 2; ++c) {
      double err = 0.0, ref = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        err += std::pow(back.channels[c][i] - a.channels[c][i], 2);
        ref += a.channels[c][i] * a.channels[c][i];
      }
      worst_rt = std::max(worst_rt, std::sqrt(err / ref));
    }
  }
  o.Check(worst_rt < 1e-6, Fmt("STFT round trip %.2e", worst_rt));

  double worst_parseval = 0.0;
  {
    const wg::MultiChannelAudio a = wg::testing::RandomAudio(2, 16000, 3);
    const wg::StftGrid g = wg::Stft(a, f);
    const std::vector<double> w = wg::AnalysisWindow(f);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t t = 0; t < g.num_frames(); ++t) {
        double time_energy = 0.0;
        for (int i = 0; i < f.frame_len; ++i) {
          const double v = a.channels[c][t * static_cast<std::size_t>(f.hop) + static_cast<std::size_t>(i)] *
                           w[static_cast<std::size_t>(i)];
          time_energy += v * v;
        }
        const auto row = g.channels[c].row(t);
        double spec = std::norm(row[0]) + std::norm(row[row.size() - 1]);
        for (std::size_t k = 1; k + 1 < row.size(); ++k) spec += 2.0 * std::norm(row[k]);
        spec /= f.fft_size;
        worst_parseval = std::max(worst_parseval, std::abs(spec - time_energy) / time_energy);
      }
    }
  }
  o.Check(worst_parseval < 1e-6, Fmt("Parseval %.2e", worst_parseval));

  double worst_grad = 0.0;
  {
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> g(0.0, 1.0);
    auto random = [&](Eigen::Index r, Eigen::Index c, double sd) {
      Eigen::MatrixXd m(r, c);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = sd * g(rng);
      return m;
    };
    constexpr double kStep = 1e-5;
    for (int draw = 0; draw < 20; ++draw) {
      const Eigen::Index d = 3 + draw % 5, h = 2 + draw % 4, out = 1 + draw % 3;
      wg::ShallowNetwork net(static_cast<std::size_t>(d), static_cast<std::size_t>(h),
                             static_cast<std::size_t>(out));
      net.w1 = random(h, d, 0.7);
      net.b1 = random(h, 1, 0.3);
      net.w2 = random(out, h, 0.7);
      net.b2 = random(out, 1, 0.3);
      const Eigen::MatrixXd x = random(6, d, 1.0);
      const Eigen::MatrixXd y = random(6, out, 1.0);
      wg::NetworkGradient grad;
      wg::MseLoss(net, x, y, &grad);
      const std::vector<double> analytic = grad.Flatten();
      std::vector<double> params = net.Flatten();
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + kStep;
        net.Unflatten(params);
        const double up = wg::MseLoss(net, x, y, nullptr);
        params[i] = saved - kStep;
        net.Unflatten(params);
        const double down = wg::MseLoss(net, x, y, nullptr);
        params[i] = saved;
        net.Unflatten(params);
        const double numeric = (up - down) / (2.0 * kStep);
        const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-7});
        worst_grad = std::max(worst_grad, std::abs(numeric - analytic[i]) / denom);
      }
    }
  }
  o.Check(worst_grad < 1e-4, Fmt("gradient check %.2e over 20 draws", worst_grad));

  std::size_t violations = 0;
  {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> decade(-6.0, 3.0);
    wg::CrossSpectra psd(8);
    std::vector<std::complex<double>> a(8), b(8);
    for (int step = 0; step < 100000; ++step) {
      for (std::size_t k = 0; k < 8; ++k) {
        const double sa = std::pow(10.0, decade(rng));
        const double sb = std::pow(10.0, decade(rng));
        a[k] = {sa * g(rng), sa * g(rng)};
        b[k] = {sb * g(rng), sb * g(rng)};
      }
      wg::PsdUpdate(psd, a, b, 0.8);
      for (std::size_t k = 0; k < 8; ++k) {
        violations += std::norm(psd.cross[k]) > psd.auto_a[k] * psd.auto_b[k] + 1e-9;
      }
    }
  }
  o.Check(violations == 0, Fmt("Cauchy-Schwarz violations in 1e5 updates: %.0f",
                               static_cast<double>(violations)));
  return o;
}

Outcome Determinism() {
  Outcome o;
  wg::SceneSpec spec;
  spec.duration_s = 5.0;
  spec.seed = 31337;
  spec.gusts = {{1.0, 3.0, 200.0}};
  o.Check(wg::MixScene(spec).audio == wg::MixScene(spec).audio, "scene regenerated identically");

  auto train = [] {
    std::vector<wg::TrainingPair> pairs;
    for (const wg::SceneSpec& s : wg::TrainingCorpus(20.0, 10.0, 5)) {
      const wg::LabeledScene scene = wg::MixScene(s);
      pairs.push_back(wg::MakeTrainingPair(scene.audio, scene.clean, DefaultFraming()));
    }
    wg::TrainingSettings settings;
    settings.hidden = 8;
    settings.max_iterations = 5;
    return wg::EncodeModel(
        wg::TrainSuppressor(pairs, wg::ContextSpec{}, wg::AttentiveRegion{}, settings).model);
  };
  o.Check(train() == train(), "model retrained bit-identically");

  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> duration(3.0, 25.0);
  std::uniform_int_distribution<int> level(0, 3);
  int equal = 0;
  for (int i = 0; i < 10; ++i) {
    wg::SceneSpec s;
    s.duration_s = std::round(duration(rng) * 1000.0) / 1000.0;
    s.wind_level = static_cast<wg::WindLevel>(level(rng));
    s.seed = rng();
    s.gusts = {{0.25 * s.duration_s, 0.75 * s.duration_s, 300.0}};
    const wg::LabeledScene scene = wg::MixScene(s);
    const auto batch = wg::DetectBatch(scene.audio, calibrated, DefaultFraming());
    const wg::StreamResult stream = wg::RunStream(scene.audio, calibrated, DefaultFraming());
    equal += stream.decisions == batch;
  }
  o.Check(equal == 10, Fmt("stream equals batch on %.0f of 10 scenes", equal));
  return o;
}

Outcome ClosedForm() {
  Outcome o;
  const double ssc = wg::SscIndicator(25.0, 100);
  o.Check(ssc == 0.75, Fmt("SSC indicator %.17g", ssc));

  wg::CrossSpectra psd(1);
  const std::vector<std::complex<double>> one = {1.0};
  wg::PsdUpdate(psd, one, one, 0.8);
  // 0.2 is not representable; the update yields the double nearest 1 - 0.8.
  const double expected = 1.0 - 0.8;
  const bool exact = psd.auto_a[0] == expected && psd.auto_b[0] == expected &&
                     psd.cross[0] == std::complex<double>(expected, 0.0);
  const bool near = std::abs(psd.auto_a[0] - 0.2) <= 4.0 * std::numeric_limits<double>::epsilon() * 0.2;
  o.Check(exact && near, Fmt("PSD one step %.17g", psd.auto_a[0]));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  wg::CrossSpectra same(16);
  std::vector<std::complex<double>> x(16);
  for (int step = 0; step < 200; ++step) {
    for (auto& v : x) v = {g(rng), g(rng)};
    wg::PsdUpdate(same, x, x, 0.8);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < 16; ++k) worst = std::max(worst, std::abs(*wg::MagnitudeCoherence(same, k) - 1.0));
  const double band = wg::BandCoherence(same, {1, 15}).mean;
  worst = std::max(worst, std::abs(band - 1.0));
  o.Check(worst <= 1e-6, Fmt("MC of identical channels within %.1e of 1", worst));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 detection accuracy", DetectionAccuracy},
      {"2 occlusion robustness", OcclusionRobustness},
      {"3 suppression quality", SuppressionQuality},
      {"4 pass-through exactness", PassThrough},
      {"5 numerical suites", NumericalSuites},
      {"6 determinism and stream equivalence", Determinism},
      {"7 closed-form examples", ClosedForm},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name, Seconds(start),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
