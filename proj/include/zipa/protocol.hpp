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

#ifndef ZIPA_PROTOCOL_HPP_
#define ZIPA_PROTOCOL_HPP_

#include <cstddef>

#include "zipa/dsp.hpp"
#include "zipa/quantizer.hpp"

namespace zipa {

struct SyncResult {
  long offset = 0;
  double correlation = 0.0;
};

// Pearson coefficient of two length-n sequences. Throws kNoVariance if
// either is constant.
double pearson(const double* a, const double* b, std::size_t n);

// Finds the lag in [0, max_lag] where the window of local best matches the
// snippet. Ties go to the smallest lag. A best correlation below floor
// throws kSyncFailed; pass a floor of -1 to always get the best lag.
SyncResult synchronize(const SampleBuffer& local, const SampleBuffer& snippet,
                       std::size_t max_lag, double floor = 0.5);

struct ReconciliationOutcome {
  bool accepted = false;
  std::size_t mismatched_bits = 0;
  std::size_t threshold = 0;
};

ReconciliationOutcome reconcile(const BitSequence& local_key,
                                const BitSequence& remote_key,
                                std::size_t threshold);

// Plug-in Shannon entropy, in bits, of non-overlapping symbols.
double entropy_per_symbol(const BitSequence& bits, std::size_t symbol_bits);

}  // namespace zipa

#endif  // ZIPA_PROTOCOL_HPP_
