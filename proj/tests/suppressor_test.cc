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


#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "windguard/errors.h"
#include "windguard/eval.h"
#include "windguard/suppressor.h"
#include "windguard/synth.h"

namespace windguard {
namespace {

Framing DefaultFraming() { return ResolveFraming({}, 16000); }

NnModel RandomModel(const Framing& framing, std::uint64_t seed, double cutoff = 500.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.05);
  NnModel m;
  m.framing = framing;
  m.region.cutoff_hz = cutoff;
  const std::size_t in = m.context.InputDim(static_cast<std::size_t>(framing.num_bins()));
  const auto out = static_cast<std::size_t>(m.region.NumBins(framing));
  m.network = ShallowNetwork(in, 12, out);
  for (Eigen::Index i = 0; i < m.network.w1.size(); ++i) m.network.w1.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < m.network.w2.size(); ++i) m.network.w2.data()[i] = g(rng);
  m.network.b2.setConstant(-4.0);
  m.network.input_mean.setConstant(-10.0);
  m.network.input_scale.setConstant(5.0);
  return m;
}

// A model trained once on a minute of synthetic speech in wind, shared by the
// quality tests below.
const NnModel& TrainedModel() {
  static const NnModel model = [] {
    const Framing f = DefaultFraming();
    std::vector<TrainingPair> pairs;
    for (const SceneSpec& spec : TrainingCorpus(60.0, 15.0, 77)) {
      const LabeledScene s = MixScene(spec);
      pairs.push_back(MakeTrainingPair(s.audio, s.clean, f));
    }
    TrainingSettings settings;
    settings.hidden = 40;
    settings.max_iterations = 40;
    return TrainSuppressor(pairs, ContextSpec{}, AttentiveRegion{}, settings).model;
  }();
  return model;
}

TEST(Region, BinCountFollowsCutoff) {
  const Framing f = DefaultFraming();
  EXPECT_EQ(AttentiveRegion{500.0}.NumBins(f), 8);
  EXPECT_EQ(AttentiveRegion{501.0}.NumBins(f), 9);
  EXPECT_EQ(AttentiveRegion{62.5}.NumBins(f), 1);
  EXPECT_TRUE(AttentiveRegion{}.Contains(7, f));
  EXPECT_FALSE(AttentiveRegion{}.Contains(8, f));
  EXPECT_EQ(AttentiveRegion{8000.0}.NumBins(f), 128);
  EXPECT_THROW(AttentiveRegion{8001.0}.NumBins(f), ConfigError);
  EXPECT_THROW(AttentiveRegion{0.0}.NumBins(f), ConfigError);
}

TEST(Region, OutputLayerMatchesAttentiveBinsAcrossConfigs) {
  for (const FramingConfig& fc : {FramingConfig{}, FramingConfig{32.0, 16.0, 192.0, 0},
                                  FramingConfig{20.0, 10.0, 200.0, 0}}) {
    const Framing f = ResolveFraming(fc, 16000);
    for (double cutoff : {70.0, 250.0, 500.0, 1000.0, 3000.0}) {
      int expected = 0;
      for (int mu = 0; mu < f.num_bins(); ++mu) {
        if (mu * f.bin_hz() < cutoff) ++expected;
      }
      const AttentiveRegion region{cutoff};
      ASSERT_EQ(region.NumBins(f), expected);
      const LabeledScene s = [&] {
        SceneSpec spec;
        spec.duration_s = 1.0;
        spec.gusts = {SteadyGust(1.0)};
        return MixScene(spec);
      }();
      const TrainingPair pair = MakeTrainingPair(s.audio, s.clean, f);
      TrainingSettings settings;
      settings.hidden = 3;
      settings.max_iterations = 1;
      ContextSpec ctx;
      ctx.radius = 1;
      const NnModel m = TrainSuppressor({&pair, 1}, ctx, region, settings).model;
      EXPECT_EQ(m.network.output_dim(), static_cast<std::size_t>(expected));
      EXPECT_NO_THROW(m.Validate());
    }
  }
}

TEST(Context, Layout) {
  const std::size_t bins = 5;
  std::vector<RealGrid> lp;
  for (int c = 0; c < 2; ++c) {
    RealGrid g(10, bins);
    for (std::size_t t = 0; t < 10; ++t) {
      for (std::size_t k = 0; k < bins; ++k) g(t, k) = 1000.0 * c + 10.0 * t + k;
    }
    lp.push_back(g);
  }
  const std::vector<double> ident = BuildContext({lp.data(), 1}, 4, {0, 1});
  EXPECT_EQ(ident, std::vector<double>(lp[0].row(4).begin(), lp[0].row(4).end()));

  const ContextSpec spec{3, 2};
  const std::vector<double> v = BuildContext(lp, 0, spec);
  ASSERT_EQ(v.size(), 14 * bins);
  for (int block = 0; block < 4; ++block) {
    for (std::size_t k = 0; k < bins; ++k) EXPECT_EQ(v[block * bins + k], lp[0](0, k));
  }
  for (int block = 4; block < 7; ++block) {
    for (std::size_t k = 0; k < bins; ++k) {
      EXPECT_EQ(v[block * bins + k], lp[0](static_cast<std::size_t>(block - 3), k));
    }
  }
  EXPECT_EQ(v[7 * bins], lp[1](0, 0));

  const std::vector<double> end = BuildContext(lp, 9, spec);
  EXPECT_EQ(end[6 * bins], lp[0](9, 0));
  EXPECT_EQ(end[5 * bins], lp[0](9, 0));
  EXPECT_EQ(end[2 * bins], lp[0](8, 0));
}

TEST(Model, ValidateRejectsLayoutMismatch) {
  const Framing f = DefaultFraming();
  NnModel m = RandomModel(f, 1);
  EXPECT_NO_THROW(m.Validate());
  m.context.radius = 2;
  EXPECT_THROW(m.Validate(), DataError);
  m = RandomModel(f, 1);
  m.region.cutoff_hz = 1000.0;
  EXPECT_THROW(m.Validate(), DataError);
}

TEST(Reconstruction, BinsAboveCutoffPassThroughBitExact) {
  const Framing f = DefaultFraming();
  for (double cutoff : {200.0, 500.0, 1500.0}) {
    const NnModel m = RandomModel(f, 3, cutoff);
    const StftGrid noisy = Stft(testing::RandomAudio(2, 16000, 4), f);
    const StftGrid out = AttentiveReconstruct(m, noisy);
    const int first = m.region.NumBins(f);
    for (std::size_t t = 0; t < noisy.num_frames(); ++t) {
      const auto in = noisy.channels[0].row(t);
      const auto got = out.channels[0].row(t);
      for (int k = first; k < f.num_bins(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        ASSERT_EQ(std::bit_cast<std::uint64_t>(got[kk].real()),
                  std::bit_cast<std::uint64_t>(in[kk].real()));
        ASSERT_EQ(std::bit_cast<std::uint64_t>(got[kk].imag()),
                  std::bit_cast<std::uint64_t>(in[kk].imag()));
      }
    }
  }
}

TEST(Reconstruction, PhaseFollowsReferenceOnEveryBin) {
  const Framing f = DefaultFraming();
  const NnModel m = RandomModel(f, 5);
  const StftGrid noisy = Stft(testing::RandomAudio(2, 8000, 6), f);
  const StftGrid out = AttentiveReconstruct(m, noisy);
  for (std::size_t t = 0; t < noisy.num_frames(); ++t) {
    for (int k = 0; k < f.num_bins(); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const double want = std::arg(noisy.channels[0](t, kk));
      const double got = std::arg(out.channels[0](t, kk));
      EXPECT_NEAR(std::remainder(got - want, 2.0 * std::numbers::pi), 0.0, 1e-12);
    }
  }
}

TEST(Reconstruction, LogPowerPredictionRestoresMagnitude) {
  const Framing f = DefaultFraming();
  const StftGrid noisy = Stft(testing::RandomAudio(1, 4000, 7), f);
  const RealGrid lp = LogPower(noisy).front();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(f.num_bins()));
  for (std::size_t t = 0; t < noisy.num_frames(); ++t) {
    std::vector<double> pred(lp.row(t).begin(), lp.row(t).begin() + 8);
    ReconstructFrame(pred, noisy.channels[0].row(t), MagnitudeRule::kHalfLogPower, out);
    for (std::size_t k = 0; k < 8; ++k) {
      const double mag = std::abs(noisy.channels[0](t, k));
      EXPECT_NEAR(std::abs(out[k]), mag, 1e-9);
    }
  }
  EXPECT_DOUBLE_EQ(MagnitudeFromLogPower(2.0, MagnitudeRule::kLiteralExp), std::exp(2.0));
  EXPECT_DOUBLE_EQ(MagnitudeFromLogPower(2.0, MagnitudeRule::kHalfLogPower), std::exp(1.0));
}

TEST(Suppress, OutputShapeAndChecks) {
  const Framing f = DefaultFraming();
  const NnModel m = RandomModel(f, 8);
  const MultiChannelAudio a = testing::RandomAudio(2, 5555, 9);
  const MultiChannelAudio out = Suppress(a, m);
  EXPECT_EQ(out.num_channels(), 1u);
  EXPECT_EQ(out.num_samples(), a.num_samples());
  EXPECT_THROW(Suppress(MultiChannelAudio(1, 5555), m), DataError);
  EXPECT_THROW(Suppress(MultiChannelAudio(2, 5555, 8000), m), DataError);
  EXPECT_EQ(Suppress(MultiChannelAudio(2, 0), m).num_samples(), 0u);
}

TEST(Suppress, SilenceStaysSilent) {
  const MultiChannelAudio out = Suppress(MultiChannelAudio(2, 16000), TrainedModel());
  double peak = 0.0;
  for (double v : out.channels[0]) peak = std::max(peak, std::abs(v));
  EXPECT_LT(20.0 * std::log10(peak + 1e-300), -80.0);
}

TEST(Suppress, ReducesInBandDistanceOnWindyScene) {
  SceneSpec spec;
  spec.duration_s = 8.0;
  spec.seed = 4242;
  spec.gusts = {SteadyGust(8.0)};
  const LabeledScene s = MixScene(spec);
  const ReconReport r = EvaluateReconstruction(s.clean, s.audio, Suppress(s.audio, TrainedModel()),
                                               DefaultFraming(), 500.0);
  EXPECT_LT(r.inband_recon_db, r.inband_noisy_db);
  EXPECT_LT(r.fullband_recon_db, r.fullband_noisy_db + 1.0);
}

TEST(Suppress, NearlyTransparentWithoutWind) {
  SceneSpec spec;
  spec.duration_s = 8.0;
  spec.seed = 4343;
  spec.wind_level = WindLevel::kNone;
  const LabeledScene s = MixScene(spec);
  const ReconReport r = EvaluateReconstruction(s.clean, s.audio, Suppress(s.audio, TrainedModel()),
                                               DefaultFraming(), 500.0);
  EXPECT_LT(std::abs(r.fullband_recon_db - r.fullband_noisy_db), 2.0);
}

TEST(Training, IdentityTaskBeatsMeanPredictor) {
  const Framing f = DefaultFraming();
  auto pair_for = [&](std::uint64_t seed) {
    SceneSpec spec;
    spec.duration_s = 6.0;
    spec.seed = seed;
    spec.wind_level = WindLevel::kNone;
    const LabeledScene s = MixScene(spec);
    return MakeTrainingPair(s.audio, s.clean, f);
  };
  const std::vector<TrainingPair> train = {pair_for(1), pair_for(2), pair_for(3)};
  TrainingSettings settings;
  settings.hidden = 20;
  settings.max_iterations = 40;
  const NnModel m = TrainSuppressor(train, ContextSpec{}, AttentiveRegion{}, settings).model;

  // Constant predictor: mean attentive log-power of the training targets.
  std::vector<double> mean(8, 0.0);
  std::size_t rows = 0;
  for (const TrainingPair& p : train) {
    const RealGrid lp = LogPower(p.clean).front();
    for (std::size_t t = 0; t < lp.rows(); ++t, ++rows) {
      for (std::size_t k = 0; k < 8; ++k) mean[k] += lp(t, k);
    }
  }
  for (double& v : mean) v /= static_cast<double>(rows);

  const TrainingPair held_out = pair_for(4);
  const RealGrid target = LogPower(held_out.clean).front();
  const RealGrid pred = PredictAttentive(m, LogPower(held_out.noisy));
  double net_mse = 0.0, mean_mse = 0.0;
  for (std::size_t t = 0; t < target.rows(); ++t) {
    for (std::size_t k = 0; k < 8; ++k) {
      net_mse += std::pow(pred(t, k) - target(t, k), 2);
      mean_mse += std::pow(mean[k] - target(t, k), 2);
    }
  }
  EXPECT_LT(net_mse, mean_mse);
}

TEST(Training, DeterministicModelAndAudio) {
  const Framing f = DefaultFraming();
  SceneSpec spec;
  spec.duration_s = 4.0;
  spec.gusts = {SteadyGust(4.0)};
  const LabeledScene s = MixScene(spec);
  const TrainingPair pair = MakeTrainingPair(s.audio, s.clean, f);
  TrainingSettings settings;
  settings.hidden = 10;
  settings.max_iterations = 10;
  const NnModel a = TrainSuppressor({&pair, 1}, ContextSpec{}, AttentiveRegion{}, settings).model;
  const NnModel b = TrainSuppressor({&pair, 1}, ContextSpec{}, AttentiveRegion{}, settings).model;
  EXPECT_TRUE(a == b);
  EXPECT_EQ(Suppress(s.audio, a).channels, Suppress(s.audio, b).channels);
}

TEST(Training, RejectsInconsistentPairs) {
  const Framing f = DefaultFraming();
  EXPECT_THROW(TrainSuppressor({}, ContextSpec{}, AttentiveRegion{}, TrainingSettings{}),
               DataError);
  EXPECT_THROW(MakeTrainingPair(MultiChannelAudio(2, 4000), MultiChannelAudio(1, 3000), f),
               DataError);
}

}  // namespace
}  // namespace windguard
