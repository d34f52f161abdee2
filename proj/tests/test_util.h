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


#ifndef WINDGUARD_TESTS_TEST_UTIL_H_
#define WINDGUARD_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>
#include <vector>

#include "windguard/audio.h"

namespace windguard::testing {

inline std::vector<double> RandomSignal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

inline MultiChannelAudio RandomAudio(std::size_t channels, std::size_t n,
                                     std::uint64_t seed) {
  MultiChannelAudio a(channels, n);
  for (std::size_t c = 0; c < channels; ++c) a.channels[c] = RandomSignal(n, seed * 31 + c);
  return a;
}

}  // namespace windguard::testing

#endif  // WINDGUARD_TESTS_TEST_UTIL_H_
