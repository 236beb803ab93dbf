// Copyright 2026  The phonoprof Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phonoprof {

// Values mirror pp_status in phonoprof.h; keep the two in sync.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kIo = 2,
  // textgrid
  kMalformedTextGrid = 10,
  kUnsupportedEncoding = 11,
  kEmptyFile = 12,
  kTierNotFound = 13,
  // embed-io
  kBadMagic = 20,
  kTruncatedFile = 21,
  kDimMismatch = 22,
  kNonFinite = 23,
  kEmptyFrameMatrix = 24,
  kIntervalOutOfRange = 25,
  // feature-config
  kOverlappingClasses = 30,
  kMissingFeature = 31,
  kUnknownFeatureName = 32,
  kOutOfRange = 33,
  // profile-engine
  kInsufficientTokens = 40,
  kDegenerateDirection = 41,
  kZeroVariance = 42,
  kIneligible = 43,
  kNoTransitions = 44,
  kNoInteriorTokens = 45,
  kInsufficientCornerTokens = 46,
  // statkit
  kTooFewPairs = 50,
  kConstantInput = 51,
  kNearSingular = 52,
  kInvalidP = 53,
  kEmptyGroup = 54,
  kTooFewStudies = 55,
  kDegenerateRho = 56,
  kSingleClass = 57,
  kClassTooSmall = 58,
  kNonConvergence = 59,
  kOutOfDomain = 60,
  kStratumTooSmall = 61,
  // pipeline
  kSchemaError = 70,
  kConflictingSeverity = 71,
  kDuplicateSpeaker = 72,
  kNoControlsForLanguage = 73,
  kInvalidSpec = 74,
};

const char* error_code_name(ErrorCode code);
std::optional<ErrorCode> error_code_from_name(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace phonoprof
