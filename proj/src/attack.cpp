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

#include "zipa/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "zipa/error.hpp"

namespace zipa {
namespace {

long floor_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

long floor_div(long a, long m) {
  long q = a / m;
  return (a % m != 0 && (a < 0) != (m < 0)) ? q - 1 : q;
}

// Depth-first search over rows. Candidate rows for frame i are ranked by
// ties first (e == 0 satisfies a 0 bit but is fragile), then by total
// margin |e|. Rows above from which no completion exists are remembered.
class RowSearch {
 public:
  RowSearch(const BitSequence& target, std::size_t frames, std::size_t bands)
      : target_(target), frames_(frames), bands_(bands) {}

  bool run(std::vector<std::uint8_t> first) {
    rows_.assign(1, std::move(first));
    budget_ = kBudget;
    return extend(1);
  }
  const std::vector<std::vector<std::uint8_t>>& rows() const { return rows_; }

 private:
  static constexpr std::size_t kBudget = 1u << 16;
  static constexpr std::size_t kMaxCandidates = 1u << 16;

  struct Candidate {
    int cost = 0;
    std::vector<std::uint8_t> row;
  };

  bool extend(std::size_t i) {
    if (i == frames_) return true;
    if (budget_ == 0) return false;
    --budget_;
    auto key = std::make_pair(i, rows_.back());
    if (dead_.count(key)) return false;
    std::vector<Candidate> cands = candidates(rows_.back(), (i - 1) * (bands_ - 1));
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& x, const Candidate& y) { return x.cost < y.cost; });
    for (Candidate& c : cands) {
      rows_.push_back(std::move(c.row));
      if (extend(i + 1)) return true;
      rows_.pop_back();
      if (budget_ == 0) return false;
    }
    dead_.insert(std::move(key));
    return false;
  }

  std::vector<Candidate> candidates(const std::vector<std::uint8_t>& above,
                                    std::size_t offset) const {
    std::vector<Candidate> out;
    std::vector<std::uint8_t> row(bands_);
    const int tie_cost = 4 * static_cast<int>(bands_) + 1;
    auto walk = [&](auto&& self, std::size_t j, int cost) -> void {
      if (out.size() >= kMaxCandidates) return;
      if (j + 1 == bands_) {
        out.push_back({cost, row});
        return;
      }
      const int want = target_[offset + j];
      const int d_above = above[j] - above[j + 1];
      for (int b = 0; b < 2; ++b) {
        int e = (row[j] - b) - d_above;
        if (want == 1 ? e <= 0 : e > 0) continue;
        row[j + 1] = static_cast<std::uint8_t>(b);
        self(self, j + 1, cost + (e == 0 ? tie_cost : 2 - std::abs(e)));
      }
    };
    for (int a = 0; a < 2; ++a) {
      row[0] = static_cast<std::uint8_t>(a);
      walk(walk, 0, 0);
    }
    return out;
  }

  const BitSequence& target_;
  std::size_t frames_;
  std::size_t bands_;
  std::size_t budget_ = 0;
  std::vector<std::vector<std::uint8_t>> rows_;
  std::set<std::pair<std::size_t, std::vector<std::uint8_t>>> dead_;
};

}  // namespace

CellPlan CellPlan::inverted() const {
  CellPlan out(frames_, bands_);
  for (std::size_t i = 0; i < frames_; ++i) {
    for (std::size_t j = 0; j < bands_; ++j) out.set(i, j, !(*this)(i, j));
  }
  return out;
}

std::string plan_to_text(const CellPlan& plan) {
  std::string out;
  out.reserve(plan.frames() * (plan.bands() + 1));
  for (std::size_t i = 0; i < plan.frames(); ++i) {
    for (std::size_t j = 0; j < plan.bands(); ++j) {
      out.push_back(plan(i, j) ? 'H' : 'L');
    }
    out.push_back('\n');
  }
  return out;
}

CellPlan plan_from_text(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) fail(Errc::kParseError, "empty plan");
  CellPlan plan(lines.size(), lines[0].size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].size() != plan.bands()) {
      fail(Errc::kParseError, "ragged plan row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < plan.bands(); ++j) {
      char c = lines[i][j];
      if (c != 'H' && c != 'L') {
        fail(Errc::kParseError, std::string("bad plan cell '") + c + "'");
      }
      plan.set(i, j, c == 'H');
    }
  }
  return plan;
}

CellPlan checkerboard_plan(std::size_t frames, std::size_t bands) {
  require(frames >= 2 && bands >= 2, "checkerboard needs at least 2x2 cells");
  CellPlan plan(frames, bands);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t j = 0; j < bands; ++j) plan.set(i, j, (i + j) % 2 == 0);
  }
  return plan;
}

EnergyMatrix ideal_energy(const CellPlan& plan, double a_h, double a_l) {
  EnergyMatrix e(plan.frames(), plan.bands());
  for (std::size_t i = 0; i < plan.frames(); ++i) {
    for (std::size_t j = 0; j < plan.bands(); ++j) {
      e(i, j) = plan(i, j) ? a_h * a_h : a_l * a_l;
    }
  }
  return e;
}

CellPlan plan_for_target(const BitSequence& target, std::size_t frames,
                         std::size_t bands) {
  require(frames >= 2 && bands >= 2, "plan needs at least 2x2 cells");
  require(target.size() == (frames - 1) * (bands - 1),
          "target length must be (frames - 1) * (bands - 1)");
  RowSearch search(target, frames, bands);
  for (int phase = 0; phase < 2; ++phase) {
    std::vector<std::uint8_t> first(bands);
    for (std::size_t j = 0; j < bands; ++j) first[j] = (j + phase) % 2 == 0;
    if (!search.run(first)) continue;
    CellPlan plan(frames, bands);
    for (std::size_t i = 0; i < frames; ++i) {
      for (std::size_t j = 0; j < bands; ++j) plan.set(i, j, search.rows()[i][j] != 0);
    }
    if (quantize(ideal_energy(plan)) == target) return plan;
  }
  fail(Errc::kUnrealizableTarget,
       "no high/low plan reproduces the target bits");
}

BitSequence predicted_bits(const CellPlan& plan, std::size_t frames,
                           long shift, std::size_t frame_len) {
  require(plan.frames() >= 1 && frame_len >= 2, "empty plan");
  const long n = static_cast<long>(frame_len);
  const long rot = floor_div(shift + n / 2, n);
  const long period = static_cast<long>(plan.frames());
  CellPlan tiled(frames, plan.bands());
  for (std::size_t i = 0; i < frames; ++i) {
    std::size_t src = static_cast<std::size_t>(
        floor_mod(static_cast<long>(i) - rot, period));
    for (std::size_t j = 0; j < plan.bands(); ++j) {
      tiled.set(i, j, plan(src, j));
    }
  }
  return quantize(ideal_energy(tiled));
}

SampleBuffer synthesize(const InjectionSpec& spec, int sample_rate) {
  const GridParams& g = spec.grid;
  validate(g, sample_rate);
  require(spec.a_h >= 0.0 && spec.a_l >= 0.0, "amplitudes must be non-negative");
  require(spec.a_h > spec.a_l || spec.a_h == 0.0, "a_H must exceed a_L");
  require(spec.cell_plan.frames() == spec.duration_frames &&
              spec.cell_plan.bands() == g.num_bands,
          "cell plan must be duration_frames x num_bands");
  const double nyquist = sample_rate / 2.0;
  for (std::size_t j = 0; j < g.num_bands; ++j) {
    if (g.band_center(j) >= nyquist) {
      fail(Errc::kInvalidBandRange, "band center at or above Nyquist");
    }
  }
  const std::size_t n = g.frame_len;
  const std::size_t bands = g.num_bands;
  const double w0 = 2.0 * std::numbers::pi / sample_rate;
  std::vector<double> out(spec.duration_frames * n, 0.0);

  std::vector<double> table;
  if (!spec.phase_continuous) {
    table.resize(bands * n);
    for (std::size_t j = 0; j < bands; ++j) {
      for (std::size_t t = 0; t < n; ++t) {
        table[j * n + t] = std::sin(w0 * g.band_center(j) * t);
      }
    }
  }
  for (std::size_t i = 0; i < spec.duration_frames; ++i) {
    double* frame = out.data() + i * n;
    for (std::size_t j = 0; j < bands; ++j) {
      double amp = spec.cell_plan(i, j) ? spec.a_h : spec.a_l;
      if (amp == 0.0) continue;
      for (std::size_t t = 0; t < n; ++t) {
        double s = spec.phase_continuous
                       ? std::sin(w0 * g.band_center(j) *
                                  static_cast<double>(i * n + t))
                       : table[j * n + t];
        frame[t] += amp * s;
      }
    }
  }
  SampleBuffer buffer(std::move(out), sample_rate);
  if (spec.phase_shift != 0 && !buffer.empty()) {
    const long len = static_cast<long>(buffer.size());
    return shift(buffer, floor_mod(spec.phase_shift, len));
  }
  return buffer;
}

SampleBuffer shift(const SampleBuffer& buffer, long k) {
  const long len = static_cast<long>(buffer.size());
  if (len == 0) return buffer;
  require(k > -len && k < len, "|k| must be below the buffer length");
  SampleBuffer out(std::vector<double>(buffer.size()), buffer.sample_rate);
  for (long t = 0; t < len; ++t) {
    out.samples[static_cast<std::size_t>(floor_mod(t + k, len))] =
        buffer.samples[static_cast<std::size_t>(t)];
  }
  return out;
}

}  // namespace zipa
