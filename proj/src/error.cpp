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

#include "recbench/error.hpp"

namespace recbench {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSpace: return "InvalidSpace";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidVector: return "InvalidVector";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingRating: return "MissingRating";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kSaturatedUser: return "SaturatedUser";
    case ErrorCode::kDivergedTraining: return "DivergedTraining";
    case ErrorCode::kInvalidUser: return "InvalidUser";
    case ErrorCode::kEmptyAggregate: return "EmptyAggregate";
    case ErrorCode::kDuplicateTrial: return "DuplicateTrial";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kInvalidSchedule: return "InvalidSchedule";
    case ErrorCode::kUnknownParam: return "UnknownParam";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
  }
  return "Error";
}

}  // namespace recbench
