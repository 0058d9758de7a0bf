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

#pragma once

#include <stdexcept>
#include <string>

namespace c2v {

enum class ErrorCode {
  kInput,       // caller violated a precondition
  kParse,       // malformed word-vector / dataset text
  kFormat,      // malformed container or side file
  kVersion,     // container written by a newer format
  kIo,
  kConfig,      // missing or unreadable configuration resource
  kDomain,      // math undefined for the input (zero norm, ...)
  kFit,         // model cannot be fitted on the given data
  kLookup,      // named entity does not resolve
  kSplit,
  kResampling,
  kEvaluation,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace c2v
