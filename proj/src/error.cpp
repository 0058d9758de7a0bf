// Copyright 2026 The c2v Authors
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

#include "c2v/error.hpp"

namespace c2v {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInput: return "input";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kVersion: return "version";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kFit: return "fit";
    case ErrorCode::kLookup: return "lookup";
    case ErrorCode::kSplit: return "split";
    case ErrorCode::kResampling: return "resampling";
    case ErrorCode::kEvaluation: return "evaluation";
  }
  return "unknown";
}

}  // namespace c2v
