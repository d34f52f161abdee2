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

#include "windguard/fft.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "windguard/errors.h"

namespace windguard {

bool IsPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

RealFft::RealFft(std::size_t size) : size_(size) {
  if (!IsPowerOfTwo(size) || size < 2) {
    throw ConfigError("FFT size must be a power of two >= 2");
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < size) ++bits;
  bit_reverse_.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    bit_reverse_[i] = r;
  }
  twiddles_.resize(size / 2);
  for (std::size_t k = 0; k < size / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(size);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void RealFft::Transform(std::vector<std::complex<double>>& data,
                        bool inverse) const {
  for (std::size_t i = 0; i < size_; ++i) {
    if (i < bit_reverse_[i]) std::swap(data[i], data[bit_reverse_[i]]);
  }
  for (std::size_t len = 2; len <= size_; len *= 2) {
    const std::size_t half = len / 2;
    const std::size_t stride = size_ / len;
    for (std::size_t start = 0; start < size_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        const std::complex<double> t = w * data[start + k + half];
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
}

void RealFft::Forward(std::span<const double> input,
                      std::span<std::complex<double>> spectrum) const {
  std::vector<std::complex<double>> data(size_);
  for (std::size_t i = 0; i < size_; ++i) data[i] = input[i];
  Transform(data, /*inverse=*/false);
  for (std::size_t k = 0; k < num_bins(); ++k) spectrum[k] = data[k];
}

void RealFft::Inverse(std::span<const std::complex<double>> spectrum,
                      std::span<double> output) const {
  // Rebuild the Hermitian-symmetric full spectrum. Imaginary parts of the DC
  // and Nyquist bins are ignored, as for any real inverse transform.
  std::vector<std::complex<double>> data(size_);
  const std::size_t half = size_ / 2;
  data[0] = spectrum[0].real();
  data[half] = spectrum[half].real();
  for (std::size_t k = 1; k < half; ++k) {
    data[k] = spectrum[k];
    data[size_ - k] = std::conj(spectrum[k]);
  }
  Transform(data, /*inverse=*/true);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) output[i] = data[i].real() * scale;
}

}  // namespace windguard
