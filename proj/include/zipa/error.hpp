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

#ifndef ZIPA_ERROR_HPP_
#define ZIPA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace zipa {

enum class Errc {
  kInvalidArgument,
  kInsufficientFrames,
  kInvalidBandRange,
  kGridTooSmall,
  kLengthMismatch,
  kEmptyInput,
  kNoVariance,
  kSyncFailed,
  kInsufficientData,
  kUnrealizableTarget,
  kUnknownLevel,
  kSweepNotFound,
  kZeroImpulseResponse,
  kParseError,
  kUnsupportedFormat,
  kIo,
  kConfig,
};

const char* errc_name(Errc code);

// All library failures surface as this type; code() is stable for tests.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(Errc::kInvalidArgument, what);
}

}  // namespace zipa

#endif  // ZIPA_ERROR_HPP_
