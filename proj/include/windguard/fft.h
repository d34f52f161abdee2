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

#ifndef WINDGUARD_FFT_H_
#define WINDGUARD_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace windguard {

// Radix-2 FFT of a real sequence with a fixed power-of-two size. The forward
// transform returns the one-sided spectrum (size/2 + 1 bins, unnormalized);
// Inverse() applies the 1/size factor so Inverse(Forward(x)) == x.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t num_bins() const { return size_ / 2 + 1; }

  void Forward(std::span<const double> input,
               std::span<std::complex<double>> spectrum) const;
  void Inverse(std::span<const std::complex<double>> spectrum,
               std::span<double> output) const;

 private:
  void Transform(std::vector<std::complex<double>>& data, bool inverse) const;

  std::size_t size_;
  std::vector<std::size_t> bit_reverse_;
  std::vector<std::complex<double>> twiddles_;
};

bool IsPowerOfTwo(std::size_t n);

}  // namespace windguard

#endif  // WINDGUARD_FFT_H_
