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

#include "zipa/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "zipa/error.hpp"
#include "zipa/fft.hpp"
#include "zipa/rng.hpp"
#include "zipa/wav.hpp"

namespace zipa {
namespace {

constexpr std::size_t kDirectTaps = 64;

// Seed streams, kept fixed so that outputs stay stable across versions.
enum Stream : std::uint64_t {
  kContextNoise = 1,
  kContextEnvelope = 2,
  kContextGate = 3,
  kNoiseA = 11,
  kNoiseB = 12,
  kNoiseC = 13,
  kPerturbation = 21,
};

std::vector<double> iir(const std::vector<double>& b,
                        const std::vector<double>& a,
                        const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < b.size() && k <= n; ++k) acc += b[k] * x[n - k];
    for (std::size_t k = 1; k < a.size() && k <= n; ++k) acc -= a[k] * y[n - k];
    y[n] = acc / a[0];
  }
  return y;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

void scale_to_rms(std::vector<double>& x, double level) {
  double r = rms(x);
  if (r > 0.0) {
    for (double& v : x) v *= level / r;
  }
}

std::vector<double> speech_like(std::size_t n, std::uint64_t seed, int rate) {
  // Pink-ish spectrum from a three-pole fit to 1/f.
  std::vector<double> x = iir({0.049922035, -0.095993537, 0.050612699, -0.004408786},
                              {1.0, -2.494956002, 2.017265875, -0.522189400},
                              gaussian(n, derive_seed(seed, kContextNoise)));

  Rng env_rng(derive_seed(seed, kContextEnvelope));
  std::uniform_real_distribution<double> rate_hz(2.0, 8.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> env(n, 0.0);
  for (int c = 0; c < 3; ++c) {
    double f = rate_hz(env_rng);
    double ph = phase(env_rng);
    for (std::size_t t = 0; t < n; ++t) {
      env[t] += std::abs(std::sin(std::numbers::pi * f * t / rate + ph)) / 3.0;
    }
  }

  // Talk spurts and pauses, edges smoothed over 20 ms.
  Rng gate_rng(derive_seed(seed, kContextGate));
  std::uniform_real_distribution<double> talk_s(0.4, 1.6);
  std::uniform_real_distribution<double> pause_s(0.2, 0.8);
  constexpr double kPauseDepth = 0.03;
  std::vector<double> gate(n, 0.0);
  std::size_t pos = 0;
  bool talking = true;
  while (pos < n) {
    double d = talking ? talk_s(gate_rng) : pause_s(gate_rng);
    std::size_t len = std::max<std::size_t>(1, static_cast<std::size_t>(d * rate));
    std::size_t end = std::min(n, pos + len);
    std::fill(gate.begin() + pos, gate.begin() + end, talking ? 1.0 : kPauseDepth);
    pos = end;
    talking = !talking;
  }
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(0.02 * rate));
  std::vector<double> csum(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) csum[t + 1] = csum[t] + gate[t];
  for (std::size_t t = 0; t < n; ++t) {
    long start = static_cast<long>(t) - static_cast<long>(k / 2);
    std::size_t lo = static_cast<std::size_t>(std::max(0L, start));
    std::size_t hi = static_cast<std::size_t>(
        std::min(static_cast<long>(n), start + static_cast<long>(k)));
    double smooth = (csum[hi] - csum[lo]) / static_cast<double>(k);
    x[t] *= env[t] * smooth;
  }
  return x;
}

}  // namespace

SampleBuffer RealizedChannel::to_legit_a(const SampleBuffer& source) const {
  return convolve(source, legit_a_ir);
}

SampleBuffer RealizedChannel::to_legit_b(const SampleBuffer& source) const {
  return convolve(source, legit_b_ir);
}

SampleBuffer RealizedChannel::to_adversary(const SampleBuffer& source) const {
  SampleBuffer out = convolve(source, adversary_ir);
  if (wall_lowpass_hz > 0.0) out = lowpass(out, wall_lowpass_hz);
  for (double& v : out.samples) v *= wall_gain;
  return out;
}

RealizedChannel realize_channel(const ChannelScenario& s) {
  require(!s.legit_ir.taps.empty() && !s.adversary_ir.taps.empty(),
          "impulse responses need at least one tap");
  RealizedChannel ch;
  ch.legit_a_ir = s.legit_ir;
  ch.legit_b_ir = s.legit_ir;
  if (s.perturbation_len > 0 && std::isfinite(s.perturbation_db)) {
    std::vector<double> p = perturbation_taps(
        s.perturbation_len, s.perturbation_db, derive_seed(s.seed, kPerturbation));
    auto& taps = ch.legit_b_ir.taps;
    if (taps.size() < p.size()) taps.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) taps[i] += p[i];
  }
  ch.adversary_ir = s.adversary_ir;
  ch.wall_gain = std::pow(10.0, s.wall_db / 20.0);
  ch.wall_lowpass_hz = s.wall_lowpass_hz;
  return ch;
}

double injection_amplitude(const ChannelScenario& s) {
  require(s.injection.has_value() && !s.injection->empty(), "no injection");
  const std::size_t n = s.context.size();
  SampleBuffer at_a = convolve(s.context, s.legit_ir);
  double p_ctx = mean_square(at_a.samples);
  double p_inj = mean_square(tile(*s.injection, n).samples);
  if (p_inj == 0.0) return 0.0;
  if (p_ctx == 0.0) fail(Errc::kInvalidArgument, "silent context, gain undefined");
  return std::sqrt(p_ctx * std::pow(10.0, s.injection_gain_db / 10.0) / p_inj);
}

DeviceRecording simulate(const ChannelScenario& s) {
  if (s.context.empty()) fail(Errc::kEmptyInput, "empty context");
  validate(s.context);
  require(std::isfinite(s.injection_gain_db) && std::isfinite(s.wall_db),
          "gains must be finite");
  const std::size_t n = s.context.size();
  const int rate = s.context.sample_rate;
  const RealizedChannel ch = realize_channel(s);

  DeviceRecording rec;
  rec.legit_a = ch.to_legit_a(s.context);
  rec.legit_b = ch.to_legit_b(s.context);
  rec.adversary = ch.to_adversary(s.context);

  if (s.injection.has_value() && !s.injection->empty()) {
    require(s.injection->sample_rate == rate, "injection sample rate mismatch");
    const double g = injection_amplitude(s);
    const SampleBuffer inj = tile(*s.injection, n);
    for (std::size_t t = 0; t < n; ++t) {
      double v = g * inj.samples[t];
      rec.legit_a.samples[t] += v;
      rec.legit_b.samples[t] += v;
      rec.adversary.samples[t] += v / ch.wall_gain;
    }
  }

  const double level = std::sqrt(mean_square(s.context.samples) *
                                 std::pow(10.0, s.noise_db / 10.0));
  if (level > 0.0) {
    auto add = [&](SampleBuffer& b, std::uint64_t stream) {
      std::vector<double> w = white_noise(n, level, derive_seed(s.seed, stream));
      for (std::size_t t = 0; t < n; ++t) b.samples[t] += w[t];
    };
    add(rec.legit_a, kNoiseA);
    add(rec.legit_b, kNoiseB);
    add(rec.adversary, kNoiseC);
  }
  return rec;
}

CalibrationTable::CalibrationTable(std::map<double, double> entries)
    : entries_(std::move(entries)) {
  require(!entries_.empty(), "calibration table is empty");
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [level, db] : entries_) {
    require(std::isfinite(level) && std::isfinite(db),
            "calibration entries must be finite");
    require(db > prev, "calibration must increase strictly with level");
    prev = db;
  }
}

CalibrationTable CalibrationTable::shipped() {
  return CalibrationTable({{50.0, -40.0}, {70.0, -30.0}, {85.0, -15.0}, {95.0, -7.5}});
}

CalibrationTable CalibrationTable::parse(const std::string& text) {
  std::map<double, double> entries;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      fail(Errc::kParseError, "calibration entry '" + item + "' lacks ':'");
    }
    try {
      std::size_t used = 0;
      std::string l = item.substr(0, colon), d = item.substr(colon + 1);
      double level = std::stod(l, &used);
      if (l.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(l);
      double db = std::stod(d, &used);
      if (d.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(d);
      if (!entries.emplace(level, db).second) {
        fail(Errc::kParseError, "duplicate calibration level " + l);
      }
    } catch (const std::logic_error&) {
      fail(Errc::kParseError, "bad calibration entry '" + item + "'");
    }
  }
  return CalibrationTable(std::move(entries));
}

std::string CalibrationTable::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (!first) out << ", ";
    out << it->first << ":" << it->second;
    first = false;
  }
  return out.str();
}

double gain_for_level(double level_dba, const CalibrationTable& table) {
  for (const auto& [level, db] : table.entries()) {
    if (std::abs(level - level_dba) < 1e-9) return db;
  }
  std::ostringstream known;
  bool first = true;
  for (const auto& [level, db] : table.entries()) {
    known << (first ? "" : ", ") << level;
    first = false;
  }
  std::ostringstream msg;
  msg << level_dba << " dBA not in calibration table (known: " << known.str() << ")";
  fail(Errc::kUnknownLevel, msg.str());
}

SampleBuffer convolve(const SampleBuffer& buffer, const ImpulseResponse& ir) {
  require(buffer.sample_rate == ir.sample_rate, "sample rate mismatch");
  require(!ir.taps.empty(), "impulse response has no taps");
  const std::size_t n = buffer.size();
  const std::size_t m = ir.taps.size();
  SampleBuffer out(std::vector<double>(n, 0.0), buffer.sample_rate);
  if (n == 0) return out;
  if (m <= kDirectTaps) {
    for (std::size_t t = 0; t < n; ++t) {
      double acc = 0.0;
      std::size_t kmax = std::min(m, t + 1);
      for (std::size_t k = 0; k < kmax; ++k) acc += ir.taps[k] * buffer.samples[t - k];
      out.samples[t] = acc;
    }
    return out;
  }
  std::vector<double> full = fft_convolve(buffer.samples, ir.taps);
  std::copy(full.begin(), full.begin() + n, out.samples.begin());
  return out;
}

SampleBuffer synth_context(const std::string& kind, double duration_s,
                           std::uint64_t seed, int sample_rate,
                           double level_rms) {
  require(duration_s > 0.0, "context duration must be positive");
  require(sample_rate > 0, "sample rate must be positive");
  if (kind.rfind("wav:", 0) == 0) {
    SampleBuffer b = read_wav(kind.substr(4));
    auto want = static_cast<std::size_t>(duration_s * b.sample_rate);
    if (b.size() > want) b.samples.resize(want);
    return b;
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  std::vector<double> x;
  if (kind == "white") {
    x = white_noise(n, level_rms, derive_seed(seed, kContextNoise));
    return SampleBuffer(std::move(x), sample_rate);
  }
  if (kind == "speech_like") {
    x = speech_like(n, seed, sample_rate);
    scale_to_rms(x, level_rms);
    return SampleBuffer(std::move(x), sample_rate);
  }
  fail(Errc::kInvalidArgument, "unknown context kind '" + kind + "'");
}

std::vector<double> white_noise(std::size_t n, double rms_level,
                                std::uint64_t seed) {
  std::vector<double> x = gaussian(n, seed);
  for (double& v : x) v *= rms_level;
  return x;
}

ImpulseResponse synth_room_ir(std::size_t length, double rt60_s,
                              std::uint64_t seed, int sample_rate,
                              double tail_scale) {
  require(length >= 1 && rt60_s > 0.0, "room IR needs length and RT60");
  std::vector<double> h = gaussian(length, seed);
  for (std::size_t t = 0; t < length; ++t) {
    // Clipping at 3 sigma keeps every reflection below the direct path for
    // tail_scale < 1/3, so peak alignment always finds tap 0.
    double g = std::clamp(h[t], -3.0, 3.0);
    h[t] = g * tail_scale * std::pow(10.0, -3.0 * t / (rt60_s * sample_rate));
  }
  h[0] = 1.0;
  return ImpulseResponse{std::move(h), sample_rate};
}

std::vector<double> perturbation_taps(std::size_t length, double energy_db,
                                      std::uint64_t seed) {
  require(length >= 2, "perturbation needs at least two taps");
  std::vector<double> p = gaussian(length, seed);
  const double tau = std::max(1.0, length / 4.0);
  p[0] = 0.0;
  double e = 0.0;
  for (std::size_t t = 1; t < length; ++t) {
    p[t] *= std::exp(-static_cast<double>(t) / tau);
    e += p[t] * p[t];
  }
  const double scale = std::pow(10.0, energy_db / 20.0) / std::sqrt(e);
  for (double& v : p) v *= scale;
  return p;
}

SampleBuffer lowpass(const SampleBuffer& buffer, double cutoff_hz) {
  require(cutoff_hz > 0.0, "cutoff must be positive");
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff_hz / buffer.sample_rate);
  SampleBuffer out(std::vector<double>(buffer.size()), buffer.sample_rate);
  double y = 0.0;
  for (std::size_t t = 0; t < buffer.size(); ++t) {
    y = (1.0 - a) * buffer.samples[t] + a * y;
    out.samples[t] = y;
  }
  return out;
}

SampleBuffer tile(const SampleBuffer& buffer, std::size_t length) {
  require(!buffer.empty(), "cannot tile an empty buffer");
  SampleBuffer out(std::vector<double>(length), buffer.sample_rate);
  for (std::size_t t = 0; t < length; ++t) {
    out.samples[t] = buffer.samples[t % buffer.size()];
  }
  return out;
}

}  // namespace zipa
