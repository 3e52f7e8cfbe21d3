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

#include "zipa/error.hpp"

namespace zipa {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid argument";
    case Errc::kInsufficientFrames: return "insufficient frames";
    case Errc::kInvalidBandRange: return "invalid band range";
    case Errc::kGridTooSmall: return "grid too small";
    case Errc::kLengthMismatch: return "length mismatch";
    case Errc::kEmptyInput: return "empty input";
    case Errc::kNoVariance: return "no variance";
    case Errc::kSyncFailed: return "sync failed";
    case Errc::kInsufficientData: return "insufficient data";
    case Errc::kUnrealizableTarget: return "unrealizable target";
    case Errc::kUnknownLevel: return "unknown level";
    case Errc::kSweepNotFound: return "sweep not found";
    case Errc::kZeroImpulseResponse: return "zero impulse response";
    case Errc::kParseError: return "parse error";
    case Errc::kUnsupportedFormat: return "unsupported format";
    case Errc::kIo: return "io error";
    case Errc::kConfig: return "config error";
  }
  return "error";
}

void fail(Errc code, const std::string& what) {
  std::string msg = errc_name(code);
  if (!what.empty()) msg += ": " + what;
  throw Error(code, msg);
}

}  // namespace zipa
