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

#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "zipa/quantizer.hpp"

using zipa::BitSequence;
using zipa::EnergyMatrix;

namespace {

// Literal per-cell evaluation, kept independent of the library loop.
std::vector<std::uint8_t> brute_force(const std::vector<std::vector<double>>& e) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 1; i < e.size(); ++i) {
    for (std::size_t j = 0; j + 1 < e[i].size(); ++j) {
      double v = e[i][j] - e[i][j + 1] - (e[i - 1][j] - e[i - 1][j + 1]);
      out.push_back(v > 0 ? 1 : 0);
    }
  }
  return out;
}

EnergyMatrix to_matrix(const std::vector<std::vector<double>>& e) {
  EnergyMatrix m(e.size(), e[0].size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = 0; j < e[i].size(); ++j) m(i, j) = e[i][j];
  }
  return m;
}

std::vector<std::vector<double>> random_grid(std::mt19937& rng, std::size_t m, std::size_t j,
                                             bool integer) {
  std::uniform_real_distribution<double> real(0.0, 10.0);
  std::uniform_int_distribution<int> whole(0, 6);
  std::vector<std::vector<double>> e(m, std::vector<double>(j));
  for (auto& row : e) {
    for (double& v : row) v = integer ? whole(rng) : real(rng);
  }
  return e;
}

BitSequence bits(std::initializer_list<int> v) {
  BitSequence b;
  for (int x : v) b.bits.push_back(static_cast<std::uint8_t>(x));
  return b;
}

}  // namespace

TEST_CASE("two-by-two examples") {
  const double a = 0.7;
  CHECK(zipa::quantize(to_matrix({{0, a}, {a, 0}})) == bits({1}));
  CHECK(zipa::quantize(to_matrix({{a, 0}, {0, a}})) == bits({0}));
}

TEST_CASE("constant matrix gives all zeros (ties fall to 0)") {
  EnergyMatrix e(6, 5);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 5; ++j) e(i, j) = 3.25;
  BitSequence b = zipa::quantize(e);
  CHECK(b.size() == 20);
  for (auto v : b.bits) CHECK(v == 0);
}

TEST_CASE("integer 5x5 matrix matches the brute-force evaluation") {
  std::mt19937 rng(5);
  auto e = random_grid(rng, 5, 5, true);
  CHECK(zipa::quantize(to_matrix(e)).bits == brute_force(e));
}

TEST_CASE("1000 random matrices match the brute-force evaluation") {
  std::mt19937 rng(1000);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  for (int n = 0; n < 1000; ++n) {
    std::size_t m = size(rng), j = size(rng);
    auto e = random_grid(rng, m, j, n % 2 == 0);
    BitSequence b = zipa::quantize(to_matrix(e));
    REQUIRE(b.size() == (m - 1) * (j - 1));
    CHECK(b.bits == brute_force(e));
  }
}

TEST_CASE("positive scaling and separable offsets leave the bits unchanged") {
  std::mt19937 rng(200);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::uniform_int_distribution<int> off(-50, 50);
  std::uniform_int_distribution<int> scale(1, 999);
  for (int n = 0; n < 200; ++n) {
    std::size_t m = size(rng), j = size(rng);
    // Integer grids keep every sum exact, so ties survive the transforms.
    auto e = random_grid(rng, m, j, true);
    BitSequence ref = zipa::quantize(to_matrix(e));
    double c = scale(rng);
    std::vector<double> r(m), s(j);
    for (double& v : r) v = off(rng);
    for (double& v : s) v = off(rng);
    auto scaled = e, shifted = e;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < j; ++k) {
        scaled[i][k] *= c;
        shifted[i][k] += r[i] + s[k];
      }
    }
    CHECK(zipa::quantize(to_matrix(scaled)) == ref);
    CHECK(zipa::quantize(to_matrix(shifted)) == ref);
  }
}

TEST_CASE("grid too small") {
  CHECK(code_of([] { zipa::quantize(EnergyMatrix(1, 5)); }) == zipa::Errc::kGridTooSmall);
  CHECK(code_of([] { zipa::quantize(EnergyMatrix(5, 1)); }) == zipa::Errc::kGridTooSmall);
}

TEST_CASE("bit error rate") {
  CHECK(zipa::bit_error_rate(bits({1, 0, 1}), bits({1, 0, 1})) == 0.0);
  CHECK(zipa::bit_error_rate(bits({1, 0, 1}), bits({0, 1, 0})) == 1.0);
  CHECK(zipa::bit_error_rate(bits({1, 0, 1, 0}), bits({1, 1, 1, 1})) == 0.5);
  CHECK(code_of([] { zipa::bit_error_rate(bits({1}), bits({1, 0})); }) ==
        zipa::Errc::kLengthMismatch);
  CHECK(code_of([] { zipa::bit_error_rate(BitSequence{}, BitSequence{}); }) ==
        zipa::Errc::kEmptyInput);
}

TEST_CASE("hex serialization is MSB first and zero padded") {
  CHECK(zipa::to_hex(bits({1, 0, 1, 1, 1})) == "b8");
  CHECK(zipa::to_hex(bits({0, 0, 0, 1, 1, 1, 1, 1})) == "1f");
  CHECK(zipa::from_hex("b8", 5) == bits({1, 0, 1, 1, 1}));
  std::mt19937 rng(9);
  for (std::size_t n = 1; n < 70; ++n) {
    BitSequence b;
    for (std::size_t i = 0; i < n; ++i) b.bits.push_back(rng() & 1);
    CHECK(zipa::from_hex(zipa::to_hex(b), n) == b);
  }
  CHECK(code_of([] { zipa::from_hex("zz", 8); }) == zipa::Errc::kParseError);
  CHECK(code_of([] { zipa::from_hex("abc", 4); }) == zipa::Errc::kParseError);
}
