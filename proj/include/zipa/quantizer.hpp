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

#ifndef ZIPA_QUANTIZER_HPP_
#define ZIPA_QUANTIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zipa/dsp.hpp"

namespace zipa {

struct BitSequence {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  bool empty() const { return bits.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  bool operator==(const BitSequence&) const = default;
};

// Signed comparison value at grid position (i, j), i >= 1, j + 1 < bands:
// (E[i][j] - E[i][j+1]) - (E[i-1][j] - E[i-1][j+1]).
double cell_diff(const EnergyMatrix& e, std::size_t i, std::size_t j);

// One bit per (i, j), i in [1, M), j in [0, J - 1), frames outer. A bit is
// 1 only for a strictly positive cell_diff.
BitSequence quantize(const EnergyMatrix& e);

std::size_t hamming_distance(const BitSequence& a, const BitSequence& b);
double bit_error_rate(const BitSequence& a, const BitSequence& b);

// First bit is the most significant bit of the first digit; the last digit
// is padded with zero bits.
std::string to_hex(const BitSequence& bits);
BitSequence from_hex(const std::string& hex, std::size_t nbits);

}  // namespace zipa

#endif  // ZIPA_QUANTIZER_HPP_
