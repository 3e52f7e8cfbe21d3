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

// Acceptance checks. Each criterion prints one PASS/FAIL line with the
// measured values; the exit code is nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "zipa/attack.hpp"
#include "zipa/channel.hpp"
#include "zipa/experiments.hpp"
#include "zipa/mitigation.hpp"
#include "zipa/protocol.hpp"
#include "zipa/quantizer.hpp"

using namespace zipa;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

ExperimentConfig config(const std::string& name) {
  return load_config(std::string(ZIPA_SOURCE_DIR) + "/configs/" + name + ".conf");
}

const ResultRow& mean_row(const std::vector<ResultRow>& rows, const std::string& var) {
  for (const ResultRow& r : rows) {
    if (r.stat == "mean" && r.variable == var) return r;
  }
  throw std::runtime_error("no mean row for " + var);
}

using Grid = std::vector<std::vector<double>>;

EnergyMatrix to_matrix(const Grid& e) {
  EnergyMatrix m(e.size(), e[0].size());
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e[i].size(); ++j) m(i, j) = e[i][j];
  return m;
}

std::vector<std::uint8_t> direct_bits(const Grid& e) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 1; i < e.size(); ++i)
    for (std::size_t j = 0; j + 1 < e[i].size(); ++j)
      out.push_back(e[i][j] - e[i][j + 1] - (e[i - 1][j] - e[i - 1][j + 1]) > 0);
  return out;
}

Outcome clean_attack() {
  CellPlan plan = checkerboard_plan(64, 16);
  InjectionSpec s;
  s.a_h = 0.5;
  s.duration_frames = 64;
  s.cell_plan = plan;
  BitSequence got = quantize(energy_matrix(synthesize(s), s.grid));
  double ber = bit_error_rate(got, predicted_bits(plan, 64, 0, s.grid.frame_len));
  return {ber == 0.0, fmt("%zu bits, BER %.6f (want 0)", got.size(), ber)};
}

Outcome quantizer_oracle() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t bad = 0, cells = 0;
  for (int n = 0; n < 1000; ++n) {
    Grid e(size(rng), std::vector<double>(size(rng)));
    for (auto& row : e)
      for (double& v : row) v = u(rng);
    std::vector<std::uint8_t> want = direct_bits(e);
    BitSequence got = quantize(to_matrix(e));
    cells += want.size();
    bad += got.bits != want;
  }
  return {bad == 0, fmt("1000 matrices, %zu cells, %zu mismatching matrices", cells, bad)};
}

Outcome invariance() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::uniform_int_distribution<int> cell(0, 9), off(-100, 100), scale(1, 1000);
  std::size_t bad = 0;
  for (int n = 0; n < 200; ++n) {
    // Integer grids keep every transform exact.
    const std::size_t m = size(rng), j = size(rng);
    Grid e(m, std::vector<double>(j));
    for (auto& row : e)
      for (double& v : row) v = cell(rng);
    const BitSequence ref = quantize(to_matrix(e));
    const double c = scale(rng);
    std::vector<double> r(m), s(j);
    for (double& v : r) v = off(rng);
    for (double& v : s) v = off(rng);
    Grid scaled = e, shifted = e;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < j; ++k) {
        scaled[i][k] *= c;
        shifted[i][k] += r[i] + s[k];
      }
    }
    bad += !(quantize(to_matrix(scaled)) == ref);
    bad += !(quantize(to_matrix(shifted)) == ref);
  }
  return {bad == 0, fmt("200 matrices, %zu changed outputs", bad)};
}

Outcome ber_vs_gain() {
  const ExperimentConfig c = config("ber_vs_gain");
  const std::vector<ResultRow> rows = run_ber_vs_gain(c);
  const std::vector<std::string> order = {"none", "50", "70", "85", "95"};
  const double reference[] = {0.46, 0.44, 0.35, 0.27, 0.20};
  bool ok = c.trials == 20 && c.duration_s == 60.0;
  std::string detail = fmt("%zu trials x %.0f s; adversary", c.trials, c.duration_s);
  double prev = 2.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    double b = *mean_row(rows, order[i]).ber_adversary;
    ok = ok && b < prev && std::abs(b - reference[i]) <= 0.10;
    prev = b;
    detail += fmt(" %s=%.4f", order[i].c_str(), b);
  }
  // The legitimate reference is the pair's BER without any injection.
  const double legit = *mean_row(rows, "none").ber_legit;
  const double top = *mean_row(rows, "95").ber_adversary;
  ok = ok && top <= legit + 0.05;
  detail += fmt("; legit baseline %.4f, top <= %.4f", legit, legit + 0.05);
  detail += fmt("; legit at 95 %.4f", *mean_row(rows, "95").ber_legit);
  return {ok, detail};
}

Outcome shift_sweep() {
  const ExperimentConfig c = config("shift_sweep");
  const std::vector<ResultRow> rows = run_shift_sweep(c);
  const long n = static_cast<long>(c.grid.frame_len);
  double at0 = *mean_row(rows, "0").ber_adversary, worst = 0.0;
  long worst_at = 0;
  for (long s : c.shifts) {
    double b = *mean_row(rows, std::to_string(s)).ber_adversary;
    if (b > worst) {
      worst = b;
      worst_at = s;
    }
  }
  // Periodicity on the clean signal: injection only, no device noise.
  ExperimentConfig clean = c;
  clean.calibration = CalibrationTable::parse("200:200");
  clean.attack_level = Level{200.0};
  clean.noise_db = -std::numeric_limits<double>::infinity();
  clean.trials = 1;
  clean.duration_s = 10.0;
  clean.shifts.clear();
  for (long s = 0; s <= 2 * n; s += n / 16) clean.shifts.push_back(s);
  const std::vector<ResultRow> cr = run_shift_sweep(clean);
  std::size_t aperiodic = 0;
  double clean_half = 0.0;
  for (long s = 0; s <= n; s += n / 16) {
    double a = *mean_row(cr, std::to_string(s)).ber_adversary;
    double b = *mean_row(cr, std::to_string(s + n)).ber_adversary;
    aperiodic += a != b;
    if (s == n / 2) clean_half = a;
  }
  bool ok = at0 <= 0.10 && worst < 0.30 && aperiodic == 0;
  return {ok, fmt("BER(0)=%.4f (<= 0.10), max=%.4f at shift %ld (< 0.30); clean signal: "
                  "%zu aperiodic shifts, BER(N/2)=%.4f",
                  at0, worst, worst_at, aperiodic, clean_half)};
}

Outcome entropy() {
  const ExperimentConfig c = config("entropy");
  const std::vector<ResultRow> rows = run_entropy(c);
  double lo = 8.0, hi = 0.0;
  for (const ResultRow& r : rows) {
    if (r.stat != "trial") continue;
    lo = std::min(lo, *r.entropy_bits);
    hi = std::max(hi, *r.entropy_bits);
  }
  const double h = *rows[rows.size() - 2].entropy_bits;
  // Controls: a long uniform stream, so the plug-in bias stays small, and
  // all zeros.
  std::mt19937_64 rng(6);
  BitSequence uniform;
  for (std::size_t i = 0; i < (1u << 20); ++i) uniform.bits.push_back(rng() & 1);
  BitSequence zeros;
  zeros.bits.assign(c.entropy_min_bits, 0);
  const double hu = entropy_per_symbol(uniform, 8), hz = entropy_per_symbol(zeros, 8);
  bool ok = h >= 6.5 && h <= 7.5 && hu >= 7.9 && hz == 0.0;
  return {ok, fmt("attack keys %.4f bits/byte (trials %.4f..%.4f, want [6.5, 7.5], >= %zu bits "
                  "each); uniform %.4f (>= 7.9); zeros %.4f (= 0)",
                  h, lo, hi, c.entropy_min_bits, hu, hz)};
}

Outcome sync_recovery() {
  const int rate = 48000;
  const std::size_t snippet = rate, max_lag = 2 * rate;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> lag(0, max_lag);
  std::size_t hits = 0;
  double worst_r = 1.0;
  for (int n = 0; n < 100; ++n) {
    SampleBuffer ctx = synth_context("speech_like", 4.0, 100 + n, rate);
    const double level = rms(ctx.samples) * std::pow(10.0, -10.0 / 20.0);
    const std::size_t k = lag(rng);
    // Both devices hear the context with independent noise 10 dB down.
    std::vector<double> wa = white_noise(snippet, level, 1000 + n);
    std::vector<double> wb = white_noise(snippet + max_lag, level, 2000 + n);
    SampleBuffer local = slice(ctx, 0, snippet + max_lag);
    SampleBuffer snip = slice(ctx, k, snippet);
    for (std::size_t t = 0; t < snip.size(); ++t) snip.samples[t] += wa[t];
    for (std::size_t t = 0; t < local.size(); ++t) local.samples[t] += wb[t];
    SyncResult r = synchronize(local, snip, max_lag);
    hits += r.offset == static_cast<long>(k);
    worst_r = std::min(worst_r, r.correlation);
  }
  return {hits >= 99, fmt("%zu/100 exact (>= 99), lowest correlation %.4f", hits, worst_r)};
}

Outcome deconvolution() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    // h[0] = 1 and a tail with L1 norm at most 0.5 keep |H| >= 0.5.
    std::vector<double> h(64);
    double l1 = 0.0;
    for (std::size_t k = 1; k < 64; ++k) {
      h[k] = u(rng) * std::exp(-static_cast<double>(k) / 12.0);
      l1 += std::abs(h[k]);
    }
    for (std::size_t k = 1; k < 64; ++k) h[k] *= 0.5 * std::abs(u(rng)) / l1;
    h[0] = 1.0;
    ImpulseResponse ir{h, 48000};
    SampleBuffer x(oracle::noise(48000, 300 + n), 48000);
    SampleBuffer y = deconvolve(convolve(x, ir), ir, 1e-6);
    worst = std::max(worst, oracle::rel_l2(y.samples, x.samples));
  }
  return {worst <= 1e-2, fmt("50 IRs, worst relative L2 error %.3e (<= 1e-2)", worst)};
}

Outcome mitigation() {
  const ExperimentConfig c = config("mitigation");
  const std::vector<ResultRow> rows = run_mitigation(c);
  std::size_t better = 0, trials = 0;
  for (const ResultRow& r : rows) {
    if (r.stat != "trial") continue;
    ++trials;
    better += *r.deconvolved_ratio > *r.raw_ratio;
  }
  const ResultRow& m = rows[rows.size() - 2];
  const double gain = *m.deconvolved_ratio / *m.raw_ratio;
  bool ok = trials == 20 && better >= 18 && gain >= c.min_amplification;
  return {ok, fmt("%zu/%zu trials improve (>= 18); mean raw %.4f, deconvolved %.4f, "
                  "amplification %.3f (>= %.2f)",
                  better, trials, *m.raw_ratio, *m.deconvolved_ratio, gain,
                  c.min_amplification)};
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {"clean-attack determinism", 1.0, clean_attack},
      {"quantizer oracle equivalence", 5.0, quantizer_oracle},
      {"invariance suite", 5.0, invariance},
      {"BER-vs-gain ordering", 300.0, ber_vs_gain},
      {"shift sweep", 300.0, shift_sweep},
      {"entropy reproduction", 120.0, entropy},
      {"synchronization recovery", 60.0, sync_recovery},
      {"deconvolution round-trip", 30.0, deconvolution},
      {"mitigation amplification", 120.0, mitigation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < all[i].limit_s;
    std::printf("criterion %zu: %s  %s: %s; %.2f s (< %.0f s)\n", i + 1, pass ? "PASS" : "FAIL",
                all[i].name, o.detail.c_str(), secs, all[i].limit_s);
    std::fflush(stdout);
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
