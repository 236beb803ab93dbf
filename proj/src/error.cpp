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

#include "error.hpp"

#include <string>

namespace phonoprof {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMalformedTextGrid: return "MalformedTextGrid";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kTierNotFound: return "TierNotFound";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kEmptyFrameMatrix: return "EmptyFrameMatrix";
    case ErrorCode::kIntervalOutOfRange: return "IntervalOutOfRange";
    case ErrorCode::kOverlappingClasses: return "OverlappingClasses";
    case ErrorCode::kMissingFeature: return "MissingFeature";
    case ErrorCode::kUnknownFeatureName: return "UnknownFeatureName";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kInsufficientTokens: return "InsufficientTokens";
    case ErrorCode::kDegenerateDirection: return "DegenerateDirection";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kIneligible: return "Ineligible";
    case ErrorCode::kNoTransitions: return "NoTransitions";
    case ErrorCode::kNoInteriorTokens: return "NoInteriorTokens";
    case ErrorCode::kInsufficientCornerTokens: return "InsufficientCornerTokens";
    case ErrorCode::kTooFewPairs: return "TooFewPairs";
    case ErrorCode::kConstantInput: return "ConstantInput";
    case ErrorCode::kNearSingular: return "NearSingular";
    case ErrorCode::kInvalidP: return "InvalidP";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kTooFewStudies: return "TooFewStudies";
    case ErrorCode::kDegenerateRho: return "DegenerateRho";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kOutOfDomain: return "OutOfDomain";
    case ErrorCode::kStratumTooSmall: return "StratumTooSmall";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kConflictingSeverity: return "ConflictingSeverity";
    case ErrorCode::kDuplicateSpeaker: return "DuplicateSpeaker";
    case ErrorCode::kNoControlsForLanguage: return "NoControlsForLanguage";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

std::optional<ErrorCode> error_code_from_name(std::string_view name) {
  for (int v = 0; v <= static_cast<int>(ErrorCode::kInvalidSpec); ++v) {
    const auto code = static_cast<ErrorCode>(v);
    const std::string_view known = error_code_name(code);
    if (known != "Unknown" && known == name) return code;
  }
  return std::nullopt;
}

}  // namespace phonoprof
