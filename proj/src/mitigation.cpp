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

#include "zipa/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "zipa/error.hpp"
#include "zipa/fft.hpp"
#include "zipa/rng.hpp"

namespace zipa {
namespace {

enum Stream : std::uint64_t {
  kSweepNoiseA = 31,
  kSweepNoiseB = 32,
  kSweepNoiseC = 33,
};

SampleBuffer add_noise_at_snr(SampleBuffer x, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db) && snr_db > 0) return x;
  const double level =
      std::sqrt(mean_square(x.samples) * std::pow(10.0, -snr_db / 10.0));
  std::vector<double> w = white_noise(x.size(), level, seed);
  for (std::size_t t = 0; t < x.size(); ++t) x.samples[t] += w[t];
  return x;
}

}  // namespace

SweepPair exp_sweep(const SweepSpec& spec, int sample_rate) {
  require(sample_rate > 0, "sample rate must be positive");
  if (!(spec.f_start > 0.0 && spec.f_start < spec.f_end &&
        spec.f_end < sample_rate / 2.0)) {
    fail(Errc::kInvalidBandRange, "sweep needs 0 < f_start < f_end < Nyquist");
  }
  require(spec.duration_s > 0.0, "sweep duration must be positive");
  require(spec.amplitude > 0.0 && spec.amplitude <= 1.0,
          "sweep amplitude must be in (0, 1]");
  require(spec.fade_s >= 0.0 && 2.0 * spec.fade_s < spec.duration_s,
          "fade longer than half the sweep");

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate));
  require(n >= 2, "sweep shorter than two samples");
  const double rate = std::log(spec.f_end / spec.f_start);
  const double l = spec.duration_s / rate;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sample_rate;
    s[i] = std::sin(2.0 * std::numbers::pi * spec.f_start * l * (std::exp(t / l) - 1.0));
  }
  const auto nf = static_cast<std::size_t>(std::llround(spec.fade_s * sample_rate));
  for (std::size_t i = 0; i < nf; ++i) {
    double w = 0.5 - 0.5 * std::cos(std::numbers::pi * i / nf);
    s[i] *= w;
    s[n - 1 - i] *= w;
  }

  // Time reversal plus a 6 dB/octave tilt flattens the overall response.
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sample_rate;
    inv[i] = s[n - 1 - i] * std::exp(-t / l);
  }
  std::vector<double> pulse = fft_convolve(s, inv);
  double peak = 0.0;
  for (double v : pulse) peak = std::max(peak, std::abs(v));
  for (double& v : inv) v /= peak * spec.amplitude;
  for (double& v : s) v *= spec.amplitude;
  return {SampleBuffer(std::move(s), sample_rate),
          SampleBuffer(std::move(inv), sample_rate)};
}

ImpulseResponse estimate_ir(const SampleBuffer& recorded,
                            const SampleBuffer& inverse, std::size_t ir_len,
                            double min_crest) {
  require(recorded.sample_rate == inverse.sample_rate, "sample rate mismatch");
  require(ir_len >= 1, "ir_len must be positive");
  require(!recorded.empty() && !inverse.empty(), "empty recording or inverse");
  std::vector<double> b = fft_convolve(recorded.samples, inverse.samples);
  std::size_t p = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (std::abs(b[i]) > std::abs(b[p])) p = i;
  }
  const double r = rms(b);
  if (!(std::abs(b[p]) >= min_crest * r) || r == 0.0) {
    fail(Errc::kSweepNotFound, "peak below " + std::to_string(min_crest) +
                                   " x RMS of the compressed recording");
  }
  ImpulseResponse ir;
  ir.sample_rate = recorded.sample_rate;
  ir.taps.assign(ir_len, 0.0);
  const double norm = 1.0 / b[p];
  for (std::size_t k = 0; k < ir_len && p + k < b.size(); ++k) {
    ir.taps[k] = b[p + k] * norm;
  }
  return ir;
}

SampleBuffer deconvolve(const SampleBuffer& recording,
                        const ImpulseResponse& ir, double eps) {
  require(eps > 0.0, "eps must be positive");
  require(recording.sample_rate == ir.sample_rate, "sample rate mismatch");
  bool nonzero = std::any_of(ir.taps.begin(), ir.taps.end(),
                             [](double v) { return v != 0.0; });
  if (!nonzero) fail(Errc::kZeroImpulseResponse, "all-zero impulse response");
  const std::size_t n = recording.size();
  SampleBuffer out(std::vector<double>(n, 0.0), recording.sample_rate);
  if (n == 0) return out;
  // Twice the linear length keeps the wrapped tail of the inverse filter
  // away from the kept samples.
  const std::size_t size = next_pow2(2 * (n + ir.taps.size()));
  RealFft fft(size);
  std::vector<std::complex<double>> y(fft.bins()), h(fft.bins());
  fft.forward(recording.samples.data(), n, y.data());
  fft.forward(ir.taps.data(), ir.taps.size(), h.data());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = y[k] * std::conj(h[k]) / (std::norm(h[k]) + eps);
  }
  std::vector<double> x(size);
  fft.inverse(y.data(), x.data());
  std::copy(x.begin(), x.begin() + n, out.samples.begin());
  return out;
}

SampleBuffer band_limit(const SampleBuffer& buffer, double lo_hz, double hi_hz) {
  require(lo_hz < hi_hz, "empty band");
  const std::size_t n = buffer.size();
  SampleBuffer out(std::vector<double>(n, 0.0), buffer.sample_rate);
  if (n == 0) return out;
  const std::size_t size = next_pow2(2 * n);
  RealFft fft(size);
  std::vector<std::complex<double>> y(fft.bins());
  fft.forward(buffer.samples.data(), n, y.data());
  const double df = static_cast<double>(buffer.sample_rate) / static_cast<double>(size);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double f = df * static_cast<double>(k);
    if (f < lo_hz || f > hi_hz) y[k] = 0.0;
  }
  std::vector<double> x(size);
  fft.inverse(y.data(), x.data());
  std::copy(x.begin(), x.begin() + n, out.samples.begin());
  return out;
}

double rms_distance(const SampleBuffer& a, const SampleBuffer& b) {
  if (a.size() != b.size()) fail(Errc::kLengthMismatch, "rms_distance");
  const double ra = rms(a.samples), rb = rms(b.samples);
  if (!(ra > 0.0) || !(rb > 0.0)) fail(Errc::kInvalidArgument, "zero-RMS input");
  double acc = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    double d = a.samples[t] / ra - b.samples[t] / rb;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

MitigationResult mitigation_experiment(const ChannelScenario& scenario,
                                       const MitigationParams& params) {
  const int rate = scenario.context.sample_rate;
  const RealizedChannel ch = realize_channel(scenario);
  const DeviceRecording rec = simulate(scenario);

  const SweepPair pair = exp_sweep(params.sweep, rate);
  std::size_t tail = params.ir_len + std::max({ch.legit_a_ir.taps.size(),
                                               ch.legit_b_ir.taps.size(),
                                               ch.adversary_ir.taps.size()});
  SampleBuffer source = pair.sweep;
  source.samples.resize(source.size() + tail, 0.0);

  const std::uint64_t seed = scenario.seed;
  ImpulseResponse est_a = estimate_ir(
      add_noise_at_snr(ch.to_legit_a(source), params.legit_snr_db,
                       derive_seed(seed, kSweepNoiseA)),
      pair.inverse, params.ir_len);
  ImpulseResponse est_b = estimate_ir(
      add_noise_at_snr(ch.to_legit_b(source), params.legit_snr_db,
                       derive_seed(seed, kSweepNoiseB)),
      pair.inverse, params.ir_len);
  ImpulseResponse est_c = estimate_ir(
      add_noise_at_snr(ch.to_adversary(source), params.adversary_snr_db,
                       derive_seed(seed, kSweepNoiseC)),
      pair.inverse, params.ir_len);

  MitigationResult out;
  auto band = [&](const SampleBuffer& x) {
    return band_limit(x, params.compare_lo_hz, params.compare_hi_hz);
  };
  out.raw_legit = rms_distance(band(rec.legit_a), band(rec.legit_b));
  out.raw_adversary = rms_distance(band(rec.legit_a), band(rec.adversary));
  const SampleBuffer da = band(deconvolve(rec.legit_a, est_a, params.eps));
  const SampleBuffer db = band(deconvolve(rec.legit_b, est_b, params.eps));
  const SampleBuffer dc = band(deconvolve(rec.adversary, est_c, params.eps));
  out.deconvolved_legit = rms_distance(da, db);
  out.deconvolved_adversary = rms_distance(da, dc);
  if (!(out.raw_legit > 0.0) || !(out.deconvolved_legit > 0.0)) {
    fail(Errc::kInvalidArgument, "legitimate recordings are identical");
  }
  out.raw_ratio = out.raw_adversary / out.raw_legit;
  out.deconvolved_ratio = out.deconvolved_adversary / out.deconvolved_legit;
  return out;
}

}  // namespace zipa
