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

#ifndef ZIPA_MITIGATION_HPP_
#define ZIPA_MITIGATION_HPP_

#include <cstddef>

#include "zipa/channel.hpp"
#include "zipa/dsp.hpp"

namespace zipa {

struct SweepSpec {
  double f_start = 20.0;
  double f_end = 23900.0;
  double duration_s = 2.0;
  double amplitude = 0.5;
  // Raised-cosine fade at both ends.
  double fade_s = 0.0;
};

struct SweepPair {
  SampleBuffer sweep;
  SampleBuffer inverse;
};

// Exponential sweep and its inverse filter, scaled so that the compressed
// pulse convolve(sweep, inverse) peaks at 1.
SweepPair exp_sweep(const SweepSpec& spec, int sample_rate = 48000);

// Peak-aligned, truncated, peak-normalized response. The peak must exceed
// min_crest times the RMS of the compressed recording.
ImpulseResponse estimate_ir(const SampleBuffer& recorded,
                            const SampleBuffer& inverse,
                            std::size_t ir_len = 4096,
                            double min_crest = 8.0);

// Y conj(H) / (|H|^2 + eps), truncated to the recording length.
SampleBuffer deconvolve(const SampleBuffer& recording,
                        const ImpulseResponse& ir, double eps);

// Zeroes every spectral bin outside [lo_hz, hi_hz].
SampleBuffer band_limit(const SampleBuffer& buffer, double lo_hz, double hi_hz);

// RMS of a - b after scaling each to unit RMS.
double rms_distance(const SampleBuffer& a, const SampleBuffer& b);

struct MitigationParams {
  double eps = 0.1;
  SweepSpec sweep;
  std::size_t ir_len = 4096;
  // Band of the distance comparison, inside the sweep band and clear of its
  // unfaded start.
  double compare_lo_hz = 100.0;
  double compare_hi_hz = 20000.0;
  // SNR of each device's sweep recording, dB.
  double legit_snr_db = 40.0;
  double adversary_snr_db = 0.0;
};

struct MitigationResult {
  double raw_ratio = 0.0;
  double deconvolved_ratio = 0.0;
  double raw_legit = 0.0;
  double raw_adversary = 0.0;
  double deconvolved_legit = 0.0;
  double deconvolved_adversary = 0.0;
};

// Every device records the context and a sweep played inside the room,
// estimates its own IR from the sweep and deconvolves its recording. Both
// distances are measured on [compare_lo_hz, compare_hi_hz].
MitigationResult mitigation_experiment(const ChannelScenario& scenario,
                                       const MitigationParams& params);

}  // namespace zipa

#endif  // ZIPA_MITIGATION_HPP_
