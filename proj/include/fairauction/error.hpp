// Copyright 2026 The fairauction Authors.
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

#ifndef FAIRAUCTION_ERROR_HPP_
#define FAIRAUCTION_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairauction {

enum class ErrorCode {
  kEmptyVector,
  kNegativeValue,
  kNonFiniteValue,
  kInvalidEll,
  kInvalidBeta,
  kInvalidExponent,
  kBisectionNotConverged,
  kEmptyServeSet,
  kZeroValueInServeSet,
  kIndexOutOfRange,
  kNonMonotoneRule,
  kQuadratureNotConverged,
  kInvalidGrid,
  kLengthMismatch,
  kInvalidLambda,
  kAllZeroValues,
  kAlphaOutOfRange,
  kInvalidX,
  kInvalidCollection,
  kInvalidPartition,
  kSetCrossesPartition,
  kOddK,
  kKTooSmall,
  kFileNotFound,
  kSchemaMismatch,
  kMalformedRow,
  kInvalidConfig,
  kEmptyIntersection,
  kEmptyHorizon,
  kNoComparableBuckets,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; `code()`
// identifies the failure class, `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyVector: return "EmptyVector";
    case ErrorCode::kNegativeValue: return "NegativeValue";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kInvalidEll: return "InvalidEll";
    case ErrorCode::kInvalidBeta: return "InvalidBeta";
    case ErrorCode::kInvalidExponent: return "InvalidExponent";
    case ErrorCode::kBisectionNotConverged: return "BisectionNotConverged";
    case ErrorCode::kEmptyServeSet: return "EmptyServeSet";
    case ErrorCode::kZeroValueInServeSet: return "ZeroValueInServeSet";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNonMonotoneRule: return "NonMonotoneRule";
    case ErrorCode::kQuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::kInvalidGrid: return "InvalidGrid";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidLambda: return "InvalidLambda";
    case ErrorCode::kAllZeroValues: return "AllZeroValues";
    case ErrorCode::kAlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::kInvalidX: return "InvalidX";
    case ErrorCode::kInvalidCollection: return "InvalidCollection";
    case ErrorCode::kInvalidPartition: return "InvalidPartition";
    case ErrorCode::kSetCrossesPartition: return "SetCrossesPartition";
    case ErrorCode::kOddK: return "OddK";
    case ErrorCode::kKTooSmall: return "KTooSmall";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyIntersection: return "EmptyIntersection";
    case ErrorCode::kEmptyHorizon: return "EmptyHorizon";
    case ErrorCode::kNoComparableBuckets: return "NoComparableBuckets";
  }
  return "Unknown";
}

}  // namespace fairauction

#endif  // FAIRAUCTION_ERROR_HPP_
