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

// Independent reference implementations shared by the unit tests.

#ifndef ZIPA_TESTS_ORACLES_HPP_
#define ZIPA_TESTS_ORACLES_HPP_

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "zipa/dsp.hpp"

namespace oracle {

inline std::vector<std::complex<double>> dft(const double* x, std::size_t n) {
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double a = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / n;
      acc += x[t] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

// True when the frequency of bin k (either half of the spectrum) lies in
// the banded region.
inline bool in_region(std::size_t k, std::size_t n, int rate, double lo, double hi) {
  std::size_t kk = k <= n / 2 ? k : n - k;
  double f = static_cast<double>(kk) * rate / n;
  return f >= lo && f <= hi;
}

// Energy of one frame after zeroing every bin outside [lo, hi], measured in
// the time domain.
inline double band_limited_energy(const double* x, std::size_t n, int rate, double lo,
                                  double hi) {
  auto spec = dft(x, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!in_region(k, n, rate, lo, hi)) spec[k] = 0.0;
  }
  double e = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double a = 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / n;
      acc += spec[k] * std::complex<double>(std::cos(a), std::sin(a));
    }
    double v = acc.real() / n;
    e += v * v;
  }
  return e;
}

// Energy of frame `frame` in band j, from a direct transform.
inline std::vector<double> band_energies(const double* x, const zipa::GridParams& g,
                                         int rate) {
  const std::size_t n = g.frame_len;
  auto spec = dft(x, n);
  std::vector<double> e(g.num_bands, 0.0);
  const double width = (g.band_hi - g.band_lo) / g.num_bands;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double f = static_cast<double>(k) * rate / n;
    if (f < g.band_lo || f > g.band_hi) continue;
    std::size_t j = 0;
    while (j + 1 < g.num_bands && f >= g.band_lo + (j + 1) * width) ++j;
    double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    e[j] += w * std::norm(spec[k]) / n;
  }
  return e;
}

inline std::vector<double> direct_convolve(const std::vector<double>& x,
                                           const std::vector<double>& h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    for (std::size_t k = 0; k < h.size() && k <= t; ++k) y[t] += h[k] * x[t - k];
  }
  return y;
}

inline std::vector<double> noise(std::size_t n, unsigned seed, double sigma = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d(0.0, sigma);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace oracle

#endif  // ZIPA_TESTS_ORACLES_HPP_
