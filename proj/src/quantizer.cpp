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

#include "zipa/quantizer.hpp"

#include <cctype>
#include <string>

#include "zipa/error.hpp"

namespace zipa {

double cell_diff(const EnergyMatrix& e, std::size_t i, std::size_t j) {
  return (e(i, j) - e(i, j + 1)) - (e(i - 1, j) - e(i - 1, j + 1));
}

BitSequence quantize(const EnergyMatrix& e) {
  if (e.frames() < 2 || e.bands() < 2) {
    fail(Errc::kGridTooSmall, std::to_string(e.frames()) + "x" +
                                  std::to_string(e.bands()));
  }
  BitSequence out;
  out.bits.reserve((e.frames() - 1) * (e.bands() - 1));
  for (std::size_t i = 1; i < e.frames(); ++i) {
    for (std::size_t j = 0; j + 1 < e.bands(); ++j) {
      out.bits.push_back(cell_diff(e, i, j) > 0.0 ? 1 : 0);
    }
  }
  return out;
}

std::size_t hamming_distance(const BitSequence& a, const BitSequence& b) {
  if (a.size() != b.size()) {
    fail(Errc::kLengthMismatch,
         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

double bit_error_rate(const BitSequence& a, const BitSequence& b) {
  std::size_t d = hamming_distance(a, b);
  if (a.empty()) fail(Errc::kEmptyInput, "bit error rate of empty keys");
  return static_cast<double>(d) / static_cast<double>(a.size());
}

std::string to_hex(const BitSequence& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      v <<= 1;
      if (i + k < bits.size()) v |= bits[i + k] & 1;
    }
    out.push_back(digits[v]);
  }
  return out;
}

BitSequence from_hex(const std::string& hex, std::size_t nbits) {
  if (hex.size() != (nbits + 3) / 4) {
    fail(Errc::kParseError, "hex length does not match bit count");
  }
  BitSequence out;
  out.bits.reserve(nbits);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (std::isxdigit(static_cast<unsigned char>(c))) {
      v = std::tolower(static_cast<unsigned char>(c)) - 'a' + 10;
    } else {
      fail(Errc::kParseError, std::string("bad hex digit '") + c + "'");
    }
    for (int k = 3; k >= 0 && out.size() < nbits; --k) {
      out.bits.push_back(static_cast<std::uint8_t>((v >> k) & 1));
    }
  }
  return out;
}

}  // namespace zipa
