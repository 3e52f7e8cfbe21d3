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

#ifndef ZIPA_FFT_HPP_
#define ZIPA_FFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

namespace zipa {

std::size_t next_pow2(std::size_t n);

// Real-to-complex transform of fixed size n, backed by FFTW. An instance
// owns its plan and scratch buffers; use one instance per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // in: up to n samples, zero-padded. out: n / 2 + 1 bins, unnormalized.
  void forward(const double* in, std::size_t count,
               std::complex<double>* out);
  // in: n / 2 + 1 bins. out: n samples, scaled by 1 / n.
  void inverse(const std::complex<double>* in, double* out);

 private:
  std::size_t n_;
  double* real_;
  void* spec_;
  void* fwd_;
  void* inv_;
};

// Full linear convolution, length a.size() + b.size() - 1.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b);

// c[l] = sum_k a[k] * x[l + k] for l in [0, lags).
std::vector<double> fft_cross_correlate(const std::vector<double>& x,
                                        const std::vector<double>& a,
                                        std::size_t lags);

}  // namespace zipa

#endif  // ZIPA_FFT_HPP_
