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

// Praat TextGrid reader for the text serializations (long and short form).
//
// Both forms carry the same value sequence; the long form only adds
// "key =" labels and bracketed item indices.  The reader therefore tokenizes
// numbers, quoted strings and <exists>/<absent> flags and ignores everything
// else, which is also how Praat itself reads these files.

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phonoprof {

struct TextInterval {
  double start = 0.0;
  double end = 0.0;
  std::string label;

  bool operator==(const TextInterval&) const = default;
};

struct Tier {
  enum class Kind { kInterval, kPoint };

  std::string name;
  Kind kind = Kind::kInterval;
  double xmin = 0.0;
  double xmax = 0.0;
  // Point tiers store each point as a zero-length interval.
  std::vector<TextInterval> intervals;

  bool operator==(const Tier&) const = default;
};

struct TextGrid {
  double xmin = 0.0;
  double xmax = 0.0;
  std::vector<Tier> tiers;

  bool operator==(const TextGrid&) const = default;
};

struct PhoneInterval {
  std::string phone;
  double start = 0.0;
  double end = 0.0;
  std::string utterance_id;

  bool operator==(const PhoneInterval&) const = default;
};

std::set<std::string> default_silence_labels();

// Decodes BOM-tagged UTF-8 / UTF-16 (LE or BE) or strict UTF-8 into UTF-8.
std::string decode_text(std::span<const std::uint8_t> bytes);

TextGrid parse_textgrid(std::span<const std::uint8_t> content);
TextGrid parse_textgrid(std::string_view content);
TextGrid read_textgrid_file(const std::string& path);

// Long text form, seconds printed with six decimals.
std::string serialize_textgrid_long(const TextGrid& grid);
// Short text form, same precision; used by tests to cross-check the reader.
std::string serialize_textgrid_short(const TextGrid& grid);

// An empty selector picks the first interval tier whose lowercased name
// contains "phone".
std::vector<PhoneInterval> extract_phone_intervals(
    const TextGrid& grid, std::string_view tier_selector, std::string_view utterance_id,
    const std::set<std::string>& silence_labels = default_silence_labels());

}  // namespace phonoprof
