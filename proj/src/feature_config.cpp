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

#include "feature_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace phonoprof {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "nasality", "voicing", "stridency", "sonorance", "manner", "high", "low", "back", "round"};

constexpr std::string_view kEnglishDefault = R"({
  "language": "en",
  "silence": ["", "sil", "sp", "spn", "<eps>"],
  "normalize_symbols": false,
  "incomplete": true,
  "corner_vowels": {
    "i": ["i", "iː"],
    "a": ["ɑ", "ɑː", "a"],
    "u": ["u", "uː"]
  },
  "features": {
    "nasality":  {"positive": ["m", "n", "ŋ"],
                  "negative": ["p", "b", "t", "d", "k", "g", "ɡ"]},
    "voicing":   {"positive": ["b", "d", "g", "ɡ", "v", "z", "ð", "ʒ", "dʒ"],
                  "negative": ["p", "t", "k", "f", "s", "θ", "ʃ", "tʃ"]},
    "stridency": {"positive": ["s", "z", "ʃ", "ʒ", "f", "v", "tʃ", "dʒ"],
                  "negative": ["p", "t", "k", "b", "d", "g", "ɡ", "m", "n", "l", "r", "ɹ"]},
    "sonorance": {"positive": ["m", "n", "ŋ", "l", "r", "ɹ", "j", "w"],
                  "negative": ["p", "b", "t", "d", "k", "g", "ɡ", "f", "v", "s", "z", "θ", "ð", "ʃ", "ʒ"]},
    "manner":    {"positive": ["p", "b", "t", "d", "k", "g", "ɡ", "m", "n", "ŋ"],
                  "negative": ["f", "v", "s", "z", "ʃ", "ʒ", "θ", "ð"]},
    "high":      {"positive": ["i", "iː", "ɪ", "u", "uː", "ʊ"],
                  "negative": ["ɑ", "ɑː", "æ", "ɛ", "ɔ", "ɔː", "ə", "ʌ"]},
    "low":       {"positive": ["ɑ", "ɑː", "æ"],
                  "negative": ["i", "iː", "ɪ", "u", "uː", "ʊ", "ə", "ɛ"]},
    "back":      {"positive": ["u", "uː", "ʊ", "ɔ", "ɔː", "ɑ", "ɑː", "ʌ"],
                  "negative": ["i", "iː", "ɪ", "ɛ", "æ"]},
    "round":     {"positive": ["u", "uː", "ʊ", "ɔ", "ɔː"],
                  "negative": ["i", "iː", "ɪ", "ɛ", "ɑ", "ɑː", "æ", "ə", "ʌ"]}
  }
}
)";

std::set<std::string> string_set(const nlohmann::json& node, const std::string& where) {
  if (!node.is_array()) fail(ErrorCode::kSchemaError, where + " must be an array of phone symbols");
  std::set<std::string> out;
  for (const auto& item : node) {
    if (!item.is_string()) fail(ErrorCode::kSchemaError, where + " must contain only strings");
    out.insert(item.get<std::string>());
  }
  return out;
}

std::set<std::string> normalized(const std::set<std::string>& in) {
  std::set<std::string> out;
  for (const auto& s : in) out.insert(normalize_phone(s));
  return out;
}

bool contains(const std::set<std::string>& set, std::string_view phone) {
  return set.find(std::string(phone)) != set.end();
}

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

std::string normalize_phone(std::string_view phone) {
  static constexpr std::array<std::string_view, 4> kMarks = {"ː", "ˑ", "ˈ", "ˌ"};
  std::string out;
  out.reserve(phone.size());
  std::size_t i = 0;
  while (i < phone.size()) {
    bool skipped = false;
    for (std::string_view mark : kMarks) {
      if (phone.substr(i, mark.size()) == mark) {
        i += mark.size();
        skipped = true;
        break;
      }
    }
    if (!skipped) out.push_back(phone[i++]);
  }
  while (out.size() > 1 && std::isdigit(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

TokenClass classify_token(std::string_view phone, const FeatureSpec& spec, bool normalize) {
  if (!normalize) {
    if (contains(spec.positive, phone)) return TokenClass::kPositive;
    if (contains(spec.negative, phone)) return TokenClass::kNegative;
    return TokenClass::kNeither;
  }
  const std::string key = normalize_phone(phone);
  const bool pos = std::any_of(spec.positive.begin(), spec.positive.end(),
                               [&](const std::string& s) { return normalize_phone(s) == key; });
  if (pos) return TokenClass::kPositive;
  const bool neg = std::any_of(spec.negative.begin(), spec.negative.end(),
                               [&](const std::string& s) { return normalize_phone(s) == key; });
  return neg ? TokenClass::kNegative : TokenClass::kNeither;
}

TokenClass LanguageConfig::classify(std::string_view phone, Feature f) const {
  return classify_token(phone, spec(f), normalize_symbols);
}

std::optional<std::size_t> LanguageConfig::corner_of(std::string_view phone) const {
  const std::string key = normalize_symbols ? normalize_phone(phone) : std::string(phone);
  for (std::size_t c = 0; c < corner_vowels.size(); ++c) {
    for (const auto& member : corner_vowels[c]) {
      if ((normalize_symbols ? normalize_phone(member) : member) == key) return c;
    }
  }
  return std::nullopt;
}

LanguageConfig load_language_config(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content.begin(), content.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kSchemaError, std::string("language config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kSchemaError, "language config must be an object");

  LanguageConfig cfg;
  if (!doc.contains("language") || !doc["language"].is_string()) {
    fail(ErrorCode::kSchemaError, "language config needs a string 'language'");
  }
  cfg.language = doc["language"].get<std::string>();
  cfg.silence_labels = doc.contains("silence") ? string_set(doc["silence"], "silence")
                                               : std::set<std::string>{"", "sil", "sp", "spn", "<eps>"};
  if (doc.contains("normalize_symbols")) {
    if (!doc["normalize_symbols"].is_boolean()) fail(ErrorCode::kSchemaError, "normalize_symbols must be boolean");
    cfg.normalize_symbols = doc["normalize_symbols"].get<bool>();
  }
  if (doc.contains("incomplete")) {
    if (!doc["incomplete"].is_boolean()) fail(ErrorCode::kSchemaError, "incomplete must be boolean");
    cfg.incomplete = doc["incomplete"].get<bool>();
  }

  if (!doc.contains("corner_vowels") || !doc["corner_vowels"].is_object()) {
    fail(ErrorCode::kMissingFeature, "language config needs 'corner_vowels' with i, a, u");
  }
  static constexpr std::array<const char*, 3> kCorners = {"i", "a", "u"};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& node = doc["corner_vowels"];
    if (!node.contains(kCorners[c])) {
      fail(ErrorCode::kMissingFeature, std::string("corner vowel '") + kCorners[c] + "' missing");
    }
    cfg.corner_vowels[c] = string_set(node[kCorners[c]], std::string("corner_vowels.") + kCorners[c]);
    if (cfg.corner_vowels[c].empty()) {
      fail(ErrorCode::kMissingFeature, std::string("corner vowel '") + kCorners[c] + "' has no phones");
    }
  }

  if (!doc.contains("features") || !doc["features"].is_object()) {
    fail(ErrorCode::kMissingFeature, "language config needs a 'features' object");
  }
  std::array<bool, kFeatureCount> seen{};
  for (const auto& [name, node] : doc["features"].items()) {
    const auto feature = feature_from_name(name);
    if (!feature) fail(ErrorCode::kUnknownFeatureName, "unknown feature '" + name + "'");
    if (!node.is_object() || !node.contains("positive") || !node.contains("negative")) {
      fail(ErrorCode::kSchemaError, "feature '" + name + "' needs 'positive' and 'negative' arrays");
    }
    FeatureSpec spec;
    spec.feature = *feature;
    spec.positive = string_set(node["positive"], "features." + name + ".positive");
    spec.negative = string_set(node["negative"], "features." + name + ".negative");
    if (spec.positive.empty() || spec.negative.empty()) {
      fail(ErrorCode::kSchemaError, "feature '" + name + "' has an empty class");
    }
    const auto pos = cfg.normalize_symbols ? normalized(spec.positive) : spec.positive;
    const auto neg = cfg.normalize_symbols ? normalized(spec.negative) : spec.negative;
    for (const auto& p : pos) {
      if (neg.contains(p)) {
        fail(ErrorCode::kOverlappingClasses, "phone '" + p + "' is both positive and negative for '" + name + "'");
      }
    }
    cfg.features[static_cast<std::size_t>(*feature)] = std::move(spec);
    seen[static_cast<std::size_t>(*feature)] = true;
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!seen[i]) fail(ErrorCode::kMissingFeature, "feature '" + std::string(kFeatureNames[i]) + "' missing");
  }
  return cfg;
}

LanguageConfig load_language_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open language config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_language_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

const LanguageConfig& english_default_config() {
  static const LanguageConfig cfg = load_language_config(kEnglishDefault);
  return cfg;
}

std::string_view english_default_config_text() { return kEnglishDefault; }

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::kControl: return "control";
    case Severity::kMild: return "mild";
    case Severity::kModerate: return "moderate";
    case Severity::kSevere: return "severe";
  }
  return "unknown";
}

std::optional<Severity> severity_from_label(std::string_view label) {
  std::string l(label);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (l == "control") return Severity::kControl;
  if (l == "mild") return Severity::kMild;
  if (l == "moderate") return Severity::kModerate;
  if (l == "severe" || l == "profound") return Severity::kSevere;
  return std::nullopt;
}

Severity map_intelligibility(double pct) {
  if (!(pct >= 0.0 && pct <= 100.0)) fail(ErrorCode::kOutOfRange, "intelligibility must lie in [0, 100]");
  if (pct > 94.0) return Severity::kControl;
  if (pct >= 85.0) return Severity::kMild;
  if (pct >= 70.0) return Severity::kModerate;
  return Severity::kSevere;
}

}  // namespace phonoprof
