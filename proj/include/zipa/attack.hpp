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

#ifndef ZIPA_ATTACK_HPP_
#define ZIPA_ATTACK_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zipa/dsp.hpp"
#include "zipa/quantizer.hpp"

namespace zipa {

// frames x bands grid, true = high-energy cell.
class CellPlan {
 public:
  CellPlan() = default;
  CellPlan(std::size_t frames, std::size_t bands)
      : frames_(frames), bands_(bands), cells_(frames * bands, 0) {}

  std::size_t frames() const { return frames_; }
  std::size_t bands() const { return bands_; }
  bool operator()(std::size_t i, std::size_t j) const {
    return cells_[i * bands_ + j] != 0;
  }
  void set(std::size_t i, std::size_t j, bool high) {
    cells_[i * bands_ + j] = high ? 1 : 0;
  }
  CellPlan inverted() const;
  bool operator==(const CellPlan&) const = default;

 private:
  std::size_t frames_ = 0;
  std::size_t bands_ = 0;
  std::vector<std::uint8_t> cells_;
};

// One line per frame, 'H' or 'L' per band.
std::string plan_to_text(const CellPlan& plan);
CellPlan plan_from_text(const std::string& text);

struct InjectionSpec {
  GridParams grid;
  double a_h = 0.5;
  double a_l = 0.0;
  std::size_t duration_frames = 0;
  long phase_shift = 0;
  CellPlan cell_plan;
  // Default is a phase reset at every frame boundary.
  bool phase_continuous = false;
};

CellPlan checkerboard_plan(std::size_t frames, std::size_t bands);

// Builds a plan whose ideal energy matrix quantizes to target. Row 0
// alternates; each later row satisfies its bits given the row above,
// preferring strict inequalities and large margins, and the search backs up
// when a row leaves no completion. Throws kUnrealizableTarget when no plan
// is found.
CellPlan plan_for_target(const BitSequence& target, std::size_t frames,
                         std::size_t bands);

// Ideal matrix: a_h^2 in high cells, a_l^2 in low cells.
EnergyMatrix ideal_energy(const CellPlan& plan, double a_h = 1.0,
                          double a_l = 0.0);

// Bits expected at a device whose frame grid sees the tiled plan delayed by
// shift samples. Each device frame is attributed to the plan frame it
// overlaps most.
BitSequence predicted_bits(const CellPlan& plan, std::size_t frames,
                           long shift, std::size_t frame_len);

SampleBuffer synthesize(const InjectionSpec& spec, int sample_rate = 48000);

// Circular rotation, positive k delays.
SampleBuffer shift(const SampleBuffer& buffer, long k);

}  // namespace zipa

#endif  // ZIPA_ATTACK_HPP_
