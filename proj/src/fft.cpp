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

#include "zipa/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <new>

#include "zipa/error.hpp"

namespace zipa {
namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  require(n >= 2, "transform size must be at least 2");
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  if (real_ == nullptr || spec == nullptr) throw std::bad_alloc();
  spec_ = spec;
  std::lock_guard<std::mutex> lock(planner_mutex());
  int size = static_cast<int>(n);
  fwd_ = fftw_plan_dft_r2c_1d(size, real_, spec, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(size, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward(const double* in, std::size_t count,
                      std::complex<double>* out) {
  count = std::min(count, n_);
  std::memcpy(real_, in, count * sizeof(double));
  std::fill(real_ + count, real_ + n_, 0.0);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(out), spec_, bins() * sizeof(fftw_complex));
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
  // c2r destroys its input, so it always runs on the scratch copy.
  std::memcpy(spec_, static_cast<const void*>(in), bins() * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(inv_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
}

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(std::max<std::size_t>(len, 2));
  RealFft fft(n);
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  fft.forward(a.data(), a.size(), fa.data());
  fft.forward(b.data(), b.size(), fb.data());
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> out(n);
  fft.inverse(fa.data(), out.data());
  out.resize(len);
  return out;
}

std::vector<double> fft_cross_correlate(const std::vector<double>& x,
                                        const std::vector<double>& a,
                                        std::size_t lags) {
  require(!a.empty() && lags >= 1, "empty correlation");
  require(x.size() + 1 >= a.size() + lags, "signal too short for lags");
  const std::size_t used = a.size() + lags - 1;
  const std::size_t n = next_pow2(std::max<std::size_t>(used + a.size(), 2));
  RealFft fft(n);
  std::vector<std::complex<double>> fx(fft.bins()), fa(fft.bins());
  fft.forward(x.data(), used, fx.data());
  fft.forward(a.data(), a.size(), fa.data());
  for (std::size_t k = 0; k < fx.size(); ++k) fx[k] *= std::conj(fa[k]);
  std::vector<double> out(n);
  fft.inverse(fx.data(), out.data());
  out.resize(lags);
  return out;
}

}  // namespace zipa
