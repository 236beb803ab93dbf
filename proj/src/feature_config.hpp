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

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace phonoprof {

enum class Feature : int {
  kNasality = 0,
  kVoicing,
  kStridency,
  kSonorance,
  kManner,
  kHigh,
  kLow,
  kBack,
  kRound,
};

inline constexpr std::size_t kFeatureCount = 9;
inline constexpr std::size_t kConsonantFeatureCount = 5;
inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::kNasality, Feature::kVoicing, Feature::kStridency, Feature::kSonorance, Feature::kManner,
    Feature::kHigh,     Feature::kLow,     Feature::kBack,      Feature::kRound};

enum class FeatureCategory { kConsonant, kVowel };

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);
inline FeatureCategory feature_category(Feature f) {
  return static_cast<int>(f) < static_cast<int>(kConsonantFeatureCount) ? FeatureCategory::kConsonant
                                                                        : FeatureCategory::kVowel;
}

enum class TokenClass { kPositive, kNegative, kNeither };

struct FeatureSpec {
  Feature feature = Feature::kNasality;
  std::set<std::string> positive;
  std::set<std::string> negative;

  FeatureCategory category() const { return feature_category(feature); }
};

// Strips length marks, stress diacritics and trailing ARPAbet stress digits.
std::string normalize_phone(std::string_view phone);

struct LanguageConfig {
  std::string language;
  std::array<FeatureSpec, kFeatureCount> features;
  // /i/, /a/, /u/ in that order.
  std::array<std::set<std::string>, 3> corner_vowels;
  std::set<std::string> silence_labels;
  bool normalize_symbols = false;
  // Phone inventories known to be partial; carried into the run log.
  bool incomplete = false;

  const FeatureSpec& spec(Feature f) const { return features[static_cast<std::size_t>(f)]; }
  TokenClass classify(std::string_view phone, Feature f) const;
  // Index 0..2 of the corner vowel the phone belongs to, if any.
  std::optional<std::size_t> corner_of(std::string_view phone) const;
};

// Exact symbol match; with `normalize` the phone and the class members are
// both passed through normalize_phone first.
TokenClass classify_token(std::string_view phone, const FeatureSpec& spec, bool normalize = false);

// Structured text (JSON) document:
//   { "language": "en", "silence": [...], "normalize_symbols": false, "incomplete": false,
//     "corner_vowels": {"i": [...], "a": [...], "u": [...]},
//     "features": {"nasality": {"positive": [...], "negative": [...]}, ...} }
LanguageConfig load_language_config(std::string_view content);
LanguageConfig load_language_config_file(const std::string& path);

// English defaults in MFA IPA symbols.  The voicing, stridency, sonorance and
// manner inventories only cover the commonly printed symbols; supply a full
// per-aligner mapping file for production runs.
const LanguageConfig& english_default_config();
std::string_view english_default_config_text();

enum class Severity : int { kControl = 0, kMild = 1, kModerate = 2, kSevere = 3 };

std::string_view severity_name(Severity s);
inline int severity_ordinal(Severity s) { return static_cast<int>(s); }
// Accepts control/mild/moderate/severe (any case); "profound" maps to severe.
std::optional<Severity> severity_from_label(std::string_view label);
// >94 control, 85..94 mild, 70..84 moderate, <70 severe.
Severity map_intelligibility(double pct);

}  // namespace phonoprof
