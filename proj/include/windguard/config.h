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


// Pipeline configuration file: INI-style sections of `key = value` lines.
// Every key is optional and defaults to the library default; unknown
// sections or keys are errors.

#ifndef WINDGUARD_CONFIG_H_
#define WINDGUARD_CONFIG_H_

#include <cstdint>
#include <string>

#include "windguard/detector.h"
#include "windguard/framing.h"
#include "windguard/nn.h"
#include "windguard/suppressor.h"

namespace windguard {

struct PipelinePaths {
  std::string model;
  std::string output_dir;

  bool operator==(const PipelinePaths&) const = default;
};

struct PipelineConfig {
  int sample_rate = kDefaultSampleRate;
  FramingConfig framing;
  DetectorConfig detector;
  AttentiveRegion region;
  ContextSpec context;
  TrainingSettings training;
  MagnitudeRule magnitude_rule = MagnitudeRule::kHalfLogPower;
  PipelinePaths paths;
  std::uint64_t seed = 1;

  // Throws ConfigError on any inconsistency between sections.
  void Validate() const;
  Framing ResolvedFraming() const;
  DetectorConfig ResolvedDetector() const;

  bool operator==(const PipelineConfig&) const = default;
};

// Throws ConfigError on syntax errors, unknown keys and invalid values.
PipelineConfig ParseConfig(const std::string& text);
PipelineConfig LoadConfig(const std::string& path);
// Text that ParseConfig maps back to an equal config.
std::string FormatConfig(const PipelineConfig& config);

// Throws ConfigError when a trained model's framing, context or attentive
// region differs from the configuration.
void CheckModelMatchesConfig(const NnModel& model, const PipelineConfig& config);

}  // namespace windguard

#endif  // WINDGUARD_CONFIG_H_
