// Copyright 2026 The zipalab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zipa/dsp.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "zipa/error.hpp"
#include "zipa/fft.hpp"

namespace zipa {

void validate(const SampleBuffer& buffer) {
  require(buffer.sample_rate > 0, "sample rate must be positive");
  for (double v : buffer.samples) {
    if (!std::isfinite(v)) fail(Errc::kInvalidArgument, "non-finite sample");
  }
}

double mean_square(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double rms(const std::vector<double>& x) { return std::sqrt(mean_square(x)); }

SampleBuffer slice(const SampleBuffer& buffer, std::size_t begin,
                   std::size_t count) {
  require(begin + count <= buffer.size(), "slice out of range");
  return SampleBuffer(
      std::vector<double>(buffer.samples.begin() + begin,
                          buffer.samples.begin() + begin + count),
      buffer.sample_rate);
}

void validate(const GridParams& grid, int sample_rate) {
  std::size_t n = grid.frame_len;
  require(n >= 2 && (n & (n - 1)) == 0, "frame_len must be a power of two");
  require(grid.num_bands >= 2, "num_bands must be at least 2");
  require(sample_rate > 0, "sample rate must be positive");
  if (!(grid.band_lo >= 0.0 && grid.band_lo < grid.band_hi &&
        grid.band_hi <= sample_rate / 2.0)) {
    fail(Errc::kInvalidBandRange,
         "[" + std::to_string(grid.band_lo) + ", " +
             std::to_string(grid.band_hi) + "] Hz at " +
             std::to_string(sample_rate) + " Hz");
  }
  std::vector<int> map = bin_to_band(grid, sample_rate);
  std::vector<int> count(grid.num_bands, 0);
  for (int b : map) {
    if (b >= 0) ++count[b];
  }
  for (std::size_t j = 0; j < grid.num_bands; ++j) {
    if (count[j] == 0) {
      fail(Errc::kInvalidBandRange,
           "band " + std::to_string(j) + " holds no transform bin");
    }
  }
}

std::vector<int> bin_to_band(const GridParams& grid, int sample_rate) {
  std::size_t bins = grid.frame_len / 2 + 1;
  std::vector<int> map(bins, -1);
  double width = grid.band_width();
  for (std::size_t k = 0; k < bins; ++k) {
    double f = static_cast<double>(k) * sample_rate / grid.frame_len;
    if (f < grid.band_lo || f > grid.band_hi) continue;
    auto j = static_cast<std::size_t>((f - grid.band_lo) / width);
    if (j >= grid.num_bands) j = grid.num_bands - 1;
    map[k] = static_cast<int>(j);
  }
  return map;
}

EnergyMatrix::EnergyMatrix(std::size_t frames, std::size_t bands,
                           std::vector<double> values)
    : frames_(frames), bands_(bands), values_(std::move(values)) {
  require(values_.size() == frames * bands, "matrix size mismatch");
}

EnergyMatrix energy_matrix(const SampleBuffer& buffer,
                           const GridParams& grid) {
  validate(grid, buffer.sample_rate);
  const std::size_t n = grid.frame_len;
  if (buffer.size() < 2 * n) {
    fail(Errc::kInsufficientFrames,
         std::to_string(buffer.size()) + " samples, need " +
             std::to_string(2 * n));
  }
  const std::size_t frames = buffer.size() / n;
  const std::vector<int> map = bin_to_band(grid, buffer.sample_rate);
  EnergyMatrix e(frames, grid.num_bands);
  RealFft fft(n);
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t i = 0; i < frames; ++i) {
    fft.forward(buffer.samples.data() + i * n, n, spec.data());
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (map[k] < 0) continue;
      double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
      e(i, static_cast<std::size_t>(map[k])) +=
          w * std::norm(spec[k]) / static_cast<double>(n);
    }
  }
  return e;
}

}  // namespace zipa
