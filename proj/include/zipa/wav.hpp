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

#ifndef ZIPA_WAV_HPP_
#define ZIPA_WAV_HPP_

#include <string>
#include <vector>

#include "zipa/dsp.hpp"

namespace zipa {

enum class WavEncoding { kPcm16, kFloat32 };

// Reads 16-bit PCM or 32-bit float RIFF/WAVE. Multichannel input keeps
// channel 0; the warning goes to *warnings if given, else to stderr.
SampleBuffer read_wav(const std::string& path,
                      std::vector<std::string>* warnings = nullptr);

// PCM output is clipped to [-1, 1).
void write_wav(const std::string& path, const SampleBuffer& buffer,
               WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace zipa

#endif  // ZIPA_WAV_HPP_
