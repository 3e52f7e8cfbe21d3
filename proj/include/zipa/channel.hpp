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

#ifndef ZIPA_CHANNEL_HPP_
#define ZIPA_CHANNEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zipa/dsp.hpp"

namespace zipa {

struct ImpulseResponse {
  std::vector<double> taps{1.0};
  int sample_rate = 48000;

  static ImpulseResponse unit(int sample_rate = 48000) {
    return ImpulseResponse{{1.0}, sample_rate};
  }
};

struct ChannelScenario {
  SampleBuffer context;
  std::optional<SampleBuffer> injection;
  // Injection power over context power at legit_a, dB.
  double injection_gain_db = 0.0;
  ImpulseResponse legit_ir;
  ImpulseResponse adversary_ir;
  // Device noise floor relative to context power; -inf disables it.
  double noise_db = -35.0;
  // Attenuation of the inside context on its way to the adversary, followed
  // by a first-order low-pass. A cutoff <= 0 disables the filter.
  double wall_db = -40.0;
  double wall_lowpass_hz = 2000.0;
  // Random decaying tail added to legit_b's IR (tap 0 untouched).
  double perturbation_db = -25.0;
  std::size_t perturbation_len = 32;
  std::uint64_t seed = 0;
};

struct DeviceRecording {
  SampleBuffer legit_a;
  SampleBuffer legit_b;
  SampleBuffer adversary;
};

// The per-device paths once the seeded perturbation is drawn. Sources are
// the signal emitted inside the room.
struct RealizedChannel {
  ImpulseResponse legit_a_ir;
  ImpulseResponse legit_b_ir;
  ImpulseResponse adversary_ir;
  double wall_gain = 1.0;
  double wall_lowpass_hz = 0.0;

  SampleBuffer to_legit_a(const SampleBuffer& source) const;
  SampleBuffer to_legit_b(const SampleBuffer& source) const;
  SampleBuffer to_adversary(const SampleBuffer& source) const;
};

RealizedChannel realize_channel(const ChannelScenario& scenario);

// legit_a = ctx*h_a + g*inj + n_a, legit_b = ctx*h_b + g*inj + n_b,
// adversary = wall(ctx*h_c) + g*inj/w + n_c. The adversary stands next to
// its speaker, so it hears the injection 1/w stronger than the devices
// inside.
DeviceRecording simulate(const ChannelScenario& scenario);

// Linear amplitude applied to the tiled injection to reach gain_db.
double injection_amplitude(const ChannelScenario& scenario);

// Maps a dBA-equivalent level to an injection-to-context ratio in dB.
class CalibrationTable {
 public:
  CalibrationTable() = default;
  explicit CalibrationTable(std::map<double, double> entries);

  // Shipped calibration: 95 -> -7.5, 85 -> -15, 70 -> -30, 50 -> -40.
  static CalibrationTable shipped();
  // "95:-7.5, 85:-15"
  static CalibrationTable parse(const std::string& text);

  const std::map<double, double>& entries() const { return entries_; }
  std::string to_string() const;

 private:
  std::map<double, double> entries_;
};

double gain_for_level(double level_dba, const CalibrationTable& table);

SampleBuffer convolve(const SampleBuffer& buffer, const ImpulseResponse& ir);

// kind is "speech_like", "white" or "wav:<path>". Synthetic kinds are
// scaled to level_rms.
SampleBuffer synth_context(const std::string& kind, double duration_s,
                           std::uint64_t seed, int sample_rate = 48000,
                           double level_rms = 0.1);

std::vector<double> white_noise(std::size_t n, double rms_level,
                                std::uint64_t seed);

// Direct path 1 at tap 0 plus an exponentially decaying noise tail drawn
// from a Gaussian clipped at 3 sigma.
ImpulseResponse synth_room_ir(std::size_t length, double rt60_s,
                              std::uint64_t seed, int sample_rate = 48000,
                              double tail_scale = 0.3);

// Decaying noise tail of the given energy (dB re unit direct path).
std::vector<double> perturbation_taps(std::size_t length, double energy_db,
                                      std::uint64_t seed);

SampleBuffer lowpass(const SampleBuffer& buffer, double cutoff_hz);
SampleBuffer tile(const SampleBuffer& buffer, std::size_t length);

}  // namespace zipa

#endif  // ZIPA_CHANNEL_HPP_
