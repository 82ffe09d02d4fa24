// Copyright 2026 The recbench Authors. All Rights Reserved.
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
// =============================================================================

#ifndef RECBENCH_ERROR_HPP
#define RECBENCH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace recbench {

enum class ErrorCode {
  kInvalidSpace,
  kUnknownModel,
  kInvalidConfig,
  kInvalidVector,
  kIoError,
  kParseError,
  kMissingRating,
  kInvalidSpec,
  kSaturatedUser,
  kDivergedTraining,
  kInvalidUser,
  kEmptyAggregate,
  kDuplicateTrial,
  kNumericalFailure,
  kInvalidSchedule,
  kUnknownParam,
  kCorruptCheckpoint,
};

std::string_view error_code_name(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (runner, CLI) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace recbench

#endif  // RECBENCH_ERROR_HPP
