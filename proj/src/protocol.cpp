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

#include "zipa/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "zipa/error.hpp"
#include "zipa/fft.hpp"

namespace zipa {

double pearson(const double* a, const double* b, std::size_t n) {
  require(n >= 2, "pearson needs at least two samples");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) fail(Errc::kNoVariance, "constant sequence");
  double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

SyncResult synchronize(const SampleBuffer& local, const SampleBuffer& snippet,
                       std::size_t max_lag, double floor) {
  const std::size_t n = snippet.size();
  require(n >= 256, "snippet shorter than 256 samples");
  require(local.size() >= n + max_lag, "local buffer shorter than snippet + max_lag");
  require(local.sample_rate == snippet.sample_rate, "sample rate mismatch");

  std::vector<double> s = snippet.samples;
  double ms = 0.0;
  for (double v : s) ms += v;
  ms /= n;
  double ss = 0.0;
  for (double& v : s) {
    v -= ms;
    ss += v * v;
  }
  if (!(ss > 0.0)) fail(Errc::kNoVariance, "constant snippet");

  // Centering local first keeps the prefix-sum variances well conditioned.
  const std::size_t used = n + max_lag;
  std::vector<double> x(local.samples.begin(), local.samples.begin() + used);
  double mx = 0.0;
  for (double v : x) mx += v;
  mx /= used;
  for (double& v : x) v -= mx;

  std::vector<double> c1(used + 1, 0.0), c2(used + 1, 0.0);
  for (std::size_t i = 0; i < used; ++i) {
    c1[i + 1] = c1[i] + x[i];
    c2[i + 1] = c2[i] + x[i] * x[i];
  }
  const std::vector<double> xc = fft_cross_correlate(x, s, max_lag + 1);

  std::vector<double> r(max_lag + 1);
  double top = -2.0;
  for (std::size_t l = 0; l <= max_lag; ++l) {
    double sum = c1[l + n] - c1[l];
    double sq = c2[l + n] - c2[l];
    double var = sq - sum * sum / n;
    if (!(var > 1e-12 * sq) || !(var > 0.0)) {
      fail(Errc::kNoVariance, "constant window at lag " + std::to_string(l));
    }
    r[l] = xc[l] / std::sqrt(ss * var);
    top = std::max(top, r[l]);
  }
  // Lags within rounding of the maximum count as ties; the smallest wins.
  long best = 0;
  while (r[best] < top - 1e-12) ++best;
  SyncResult out;
  out.offset = best;
  out.correlation =
      pearson(snippet.samples.data(), local.samples.data() + best, n);
  if (out.correlation < floor) {
    fail(Errc::kSyncFailed, "best correlation " +
                                std::to_string(out.correlation) +
                                " below floor " + std::to_string(floor));
  }
  return out;
}

ReconciliationOutcome reconcile(const BitSequence& local_key,
                                const BitSequence& remote_key,
                                std::size_t threshold) {
  ReconciliationOutcome out;
  out.mismatched_bits = hamming_distance(local_key, remote_key);
  out.threshold = threshold;
  out.accepted = out.mismatched_bits <= threshold;
  return out;
}

double entropy_per_symbol(const BitSequence& bits, std::size_t symbol_bits) {
  require(symbol_bits >= 1 && symbol_bits <= 32, "symbol_bits out of range");
  const std::size_t count = bits.size() / symbol_bits;
  if (count < 2) {
    fail(Errc::kInsufficientData, std::to_string(count) + " symbols");
  }
  std::unordered_map<std::uint32_t, std::size_t> hist;
  for (std::size_t s = 0; s < count; ++s) {
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < symbol_bits; ++k) {
      v = (v << 1) | (bits[s * symbol_bits + k] & 1u);
    }
    ++hist[v];
  }
  double h = 0.0;
  for (const auto& [sym, c] : hist) {
    double p = static_cast<double>(c) / static_cast<double>(count);
    h -= p * std::log2(p);
  }
  return h < 0.0 ? 0.0 : h;
}

}  // namespace zipa
