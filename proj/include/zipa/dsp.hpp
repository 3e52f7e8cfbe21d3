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

#ifndef ZIPA_DSP_HPP_
#define ZIPA_DSP_HPP_

#include <cstddef>
#include <vector>

namespace zipa {

struct SampleBuffer {
  std::vector<double> samples;
  int sample_rate = 48000;

  SampleBuffer() = default;
  SampleBuffer(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double operator[](std::size_t i) const { return samples[i]; }
};

// Throws unless sample_rate > 0 and every sample is finite.
void validate(const SampleBuffer& buffer);

double mean_square(const std::vector<double>& x);
double rms(const std::vector<double>& x);

// Sub-range copy [begin, begin + count).
SampleBuffer slice(const SampleBuffer& buffer, std::size_t begin,
                   std::size_t count);

struct GridParams {
  std::size_t frame_len = 1024;
  std::size_t num_bands = 16;
  double band_lo = 1000.0;
  double band_hi = 9000.0;

  double band_width() const { return (band_hi - band_lo) / num_bands; }
  double band_center(std::size_t j) const {
    return band_lo + (static_cast<double>(j) + 0.5) * band_width();
  }
};

// Checks the grid against a sample rate. Errors: kInvalidArgument for a
// malformed grid, kInvalidBandRange when bounds exceed Nyquist or a band
// owns no transform bin.
void validate(const GridParams& grid, int sample_rate);

// Band index of every rfft bin (frame_len / 2 + 1 entries), -1 if ignored.
// A bin belongs to the band containing its center frequency; the upper
// edge of the last band is inclusive.
std::vector<int> bin_to_band(const GridParams& grid, int sample_rate);

class EnergyMatrix {
 public:
  EnergyMatrix() = default;
  EnergyMatrix(std::size_t frames, std::size_t bands)
      : frames_(frames), bands_(bands), values_(frames * bands, 0.0) {}
  EnergyMatrix(std::size_t frames, std::size_t bands,
               std::vector<double> values);

  std::size_t frames() const { return frames_; }
  std::size_t bands() const { return bands_; }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[i * bands_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * bands_ + j];
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t frames_ = 0;
  std::size_t bands_ = 0;
  std::vector<double> values_;
};

// Non-overlapping rectangular frames; E[i][j] is the one-sided power
// 2|X_k|^2 / N summed over the bins of band j (DC and Nyquist counted
// once), so a row sums to the band-limited time-domain energy of the frame.
EnergyMatrix energy_matrix(const SampleBuffer& buffer, const GridParams& grid);

}  // namespace zipa

#endif  // ZIPA_DSP_HPP_
