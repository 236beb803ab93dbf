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

#include "textgrid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "error.hpp"

namespace phonoprof {

namespace {

constexpr double kBoundsTolerance = 1e-3;  // 1 ms
constexpr double kOrderTolerance = 1e-9;

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_utf16(std::span<const std::uint8_t> bytes, bool little_endian) {
  if (bytes.size() % 2 != 0) fail(ErrorCode::kUnsupportedEncoding, "UTF-16 content has odd byte length");
  std::string out;
  out.reserve(bytes.size() / 2);
  auto unit = [&](std::size_t i) -> std::uint32_t {
    return little_endian ? (bytes[i] | (bytes[i + 1] << 8)) : ((bytes[i] << 8) | bytes[i + 1]);
  };
  for (std::size_t i = 0; i < bytes.size(); i += 2) {
    std::uint32_t u = unit(i);
    if (u >= 0xD800 && u <= 0xDBFF) {
      if (i + 3 >= bytes.size()) fail(ErrorCode::kUnsupportedEncoding, "truncated UTF-16 surrogate pair");
      const std::uint32_t lo = unit(i + 2);
      if (lo < 0xDC00 || lo > 0xDFFF) fail(ErrorCode::kUnsupportedEncoding, "invalid UTF-16 surrogate pair");
      u = 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00);
      i += 2;
    } else if (u >= 0xDC00 && u <= 0xDFFF) {
      fail(ErrorCode::kUnsupportedEncoding, "unpaired UTF-16 low surrogate");
    }
    append_utf8(out, u);
  }
  return out;
}

bool valid_utf8(std::span<const std::uint8_t> s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const std::uint8_t c = s[i];
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    const std::uint32_t min_cp = len == 2 ? 0x80 : len == 3 ? 0x800 : 0x10000;
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

struct Token {
  enum class Kind { kNumber, kString, kFlag };
  Kind kind;
  std::string text;
  double number = 0.0;
  int line = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '"') {
      const int start_line = line;
      std::string value;
      ++i;
      for (;;) {
        if (i >= n) fail(ErrorCode::kMalformedTextGrid, "unterminated string starting on line " + std::to_string(start_line));
        if (text[i] == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            value.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        value.push_back(text[i]);
        ++i;
      }
      tokens.push_back({Token::Kind::kString, std::move(value), 0.0, start_line});
    } else if (c == '!') {
      while (i < n && text[i] != '\n') ++i;
    } else if (c == '[') {
      // item index such as "intervals [3]:"
      while (i < n && text[i] != ']' && text[i] != '\n') ++i;
      if (i < n && text[i] == ']') ++i;
    } else if (c == '<') {
      const std::size_t close = text.find('>', i);
      if (close == std::string_view::npos) fail(ErrorCode::kMalformedTextGrid, "unterminated flag on line " + std::to_string(line));
      tokens.push_back({Token::Kind::kFlag, std::string(text.substr(i + 1, close - i - 1)), 0.0, line});
      i = close + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      std::size_t j = i;
      while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      std::string_view word = text.substr(i, j - i);
      if (!word.empty() && word.front() == '+') word.remove_prefix(1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
      if (ec != std::errc() || ptr != word.data() + word.size()) {
        fail(ErrorCode::kMalformedTextGrid, "bad number '" + std::string(word) + "' on line " + std::to_string(line));
      }
      tokens.push_back({Token::Kind::kNumber, std::string(word), value, line});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      // key names: skip the identifier so embedded digits are not read as values
      while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
    } else {
      ++i;
    }
  }
  return tokens;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& next(Token::Kind kind, const char* what) {
    if (done()) {
      const int line = tokens_.empty() ? 1 : tokens_.back().line;
      fail(ErrorCode::kMalformedTextGrid, std::string("unexpected end of file while reading ") + what + " (line " + std::to_string(line) + ")");
    }
    const Token& t = tokens_[pos_++];
    if (t.kind != kind) {
      fail(ErrorCode::kMalformedTextGrid, std::string("expected ") + what + " on line " + std::to_string(t.line) + ", found '" + t.text + "'");
    }
    return t;
  }

  double number(const char* what) { return next(Token::Kind::kNumber, what).number; }
  const std::string& string(const char* what) { return next(Token::Kind::kString, what).text; }

  long count(const char* what) {
    const Token& t = next(Token::Kind::kNumber, what);
    if (t.number < 0 || t.number != static_cast<double>(static_cast<long>(t.number))) {
      fail(ErrorCode::kMalformedTextGrid, std::string("invalid ") + what + " '" + t.text + "' on line " + std::to_string(t.line));
    }
    return static_cast<long>(t.number);
  }

  int line() const { return done() ? (tokens_.empty() ? 1 : tokens_.back().line) : tokens_[pos_].line; }

  const Token& peek() const { return tokens_[pos_]; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

[[noreturn]] void malformed(const std::string& what, int line) {
  fail(ErrorCode::kMalformedTextGrid, what + " (line " + std::to_string(line) + ")");
}

Tier read_tier(TokenStream& ts, const TextGrid& grid) {
  const int tier_line = ts.line();
  const std::string cls = ts.string("tier class");
  Tier tier;
  if (cls == "IntervalTier") {
    tier.kind = Tier::Kind::kInterval;
  } else if (cls == "TextTier") {
    tier.kind = Tier::Kind::kPoint;
  } else {
    malformed("unknown tier class '" + cls + "'", tier_line);
  }
  tier.name = ts.string("tier name");
  tier.xmin = ts.number("tier xmin");
  tier.xmax = ts.number("tier xmax");
  if (tier.xmin > tier.xmax) malformed("tier '" + tier.name + "' has xmin > xmax", tier_line);
  if (tier.xmin < grid.xmin - kBoundsTolerance || tier.xmax > grid.xmax + kBoundsTolerance) {
    malformed("tier '" + tier.name + "' extends outside the grid", tier_line);
  }
  const long count = ts.count("interval count");
  tier.intervals.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    const int line = ts.line();
    TextInterval iv;
    if (tier.kind == Tier::Kind::kInterval) {
      iv.start = ts.number("interval xmin");
      iv.end = ts.number("interval xmax");
      iv.label = ts.string("interval text");
    } else {
      iv.start = iv.end = ts.number("point time");
      iv.label = ts.string("point mark");
    }
    if (iv.end < iv.start) malformed("interval ends before it starts", line);
    if (iv.start < grid.xmin - kBoundsTolerance || iv.end > grid.xmax + kBoundsTolerance) {
      malformed("interval lies outside the grid bounds", line);
    }
    if (!tier.intervals.empty()) {
      const double prev_end = tier.intervals.back().end;
      const double prev_start = tier.intervals.back().start;
      if (iv.start < prev_start || iv.start < prev_end - kOrderTolerance) {
        malformed("intervals out of order or overlapping", line);
      }
    }
    tier.intervals.push_back(std::move(iv));
  }
  return tier;
}

std::string format_seconds(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::set<std::string> default_silence_labels() { return {"", "sil", "sp", "spn", "<eps>"}; }

std::string decode_text(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 3 && bytes[0] == 0xEF && bytes[1] == 0xBB && bytes[2] == 0xBF) {
    auto rest = bytes.subspan(3);
    if (!valid_utf8(rest)) fail(ErrorCode::kUnsupportedEncoding, "invalid UTF-8 after BOM");
    return std::string(rest.begin(), rest.end());
  }
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xFE) return decode_utf16(bytes.subspan(2), true);
  if (bytes.size() >= 2 && bytes[0] == 0xFE && bytes[1] == 0xFF) return decode_utf16(bytes.subspan(2), false);
  if (!valid_utf8(bytes)) fail(ErrorCode::kUnsupportedEncoding, "content is neither BOM-tagged nor valid UTF-8");
  return std::string(bytes.begin(), bytes.end());
}

TextGrid parse_textgrid(std::span<const std::uint8_t> content) {
  if (content.empty()) fail(ErrorCode::kEmptyFile, "TextGrid content is empty");
  static constexpr std::string_view kBinaryMagic = "ooBinaryFile";
  if (content.size() >= kBinaryMagic.size() &&
      std::equal(kBinaryMagic.begin(), kBinaryMagic.end(), content.begin())) {
    fail(ErrorCode::kMalformedTextGrid, "binary TextGrid files are not supported; save as text (line 1)");
  }
  const std::string text = decode_text(content);
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    fail(ErrorCode::kEmptyFile, "TextGrid content is empty");
  }

  TokenStream ts(tokenize(text));
  if (ts.done()) malformed("no TextGrid header found", 1);
  const int header_line = ts.line();
  const std::string& file_type = ts.string("file type");
  if (file_type != "ooTextFile") malformed("unexpected file type '" + file_type + "'", header_line);
  const std::string& object_class = ts.string("object class");
  if (object_class != "TextGrid") malformed("object class is '" + object_class + "', not TextGrid", header_line);

  TextGrid grid;
  const int bounds_line = ts.line();
  grid.xmin = ts.number("grid xmin");
  grid.xmax = ts.number("grid xmax");
  if (grid.xmin > grid.xmax) malformed("grid xmin > xmax", bounds_line);

  const int flag_line = ts.line();
  const std::string flag = ts.next(Token::Kind::kFlag, "<exists> flag").text;
  if (flag == "exists") {
    const long size = ts.count("tier count");
    grid.tiers.reserve(static_cast<std::size_t>(size));
    for (long k = 0; k < size; ++k) grid.tiers.push_back(read_tier(ts, grid));
  } else if (flag != "absent") {
    malformed("unexpected flag <" + flag + ">", flag_line);
  }
  if (!ts.done()) malformed("trailing content after the declared tiers", ts.peek().line);
  return grid;
}

TextGrid parse_textgrid(std::string_view content) {
  return parse_textgrid(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(content.data()), content.size()));
}

TextGrid read_textgrid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open TextGrid '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_textgrid(std::span<const std::uint8_t>(bytes));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string serialize_textgrid_long(const TextGrid& grid) {
  std::ostringstream out;
  out << "File type = \"ooTextFile\"\n"
      << "Object class = \"TextGrid\"\n\n"
      << "xmin = " << format_seconds(grid.xmin) << " \n"
      << "xmax = " << format_seconds(grid.xmax) << " \n";
  if (grid.tiers.empty()) {
    out << "tiers? <absent> \n";
    return out.str();
  }
  out << "tiers? <exists> \n"
      << "size = " << grid.tiers.size() << " \n"
      << "item []: \n";
  for (std::size_t t = 0; t < grid.tiers.size(); ++t) {
    const Tier& tier = grid.tiers[t];
    const bool points = tier.kind == Tier::Kind::kPoint;
    out << "    item [" << (t + 1) << "]:\n"
        << "        class = " << quote(points ? "TextTier" : "IntervalTier") << " \n"
        << "        name = " << quote(tier.name) << " \n"
        << "        xmin = " << format_seconds(tier.xmin) << " \n"
        << "        xmax = " << format_seconds(tier.xmax) << " \n";
    const char* plural = points ? "points" : "intervals";
    out << "        " << plural << ": size = " << tier.intervals.size() << " \n";
    for (std::size_t k = 0; k < tier.intervals.size(); ++k) {
      const TextInterval& iv = tier.intervals[k];
      out << "        " << plural << " [" << (k + 1) << "]:\n";
      if (points) {
        out << "            number = " << format_seconds(iv.start) << " \n"
            << "            mark = " << quote(iv.label) << " \n";
      } else {
        out << "            xmin = " << format_seconds(iv.start) << " \n"
            << "            xmax = " << format_seconds(iv.end) << " \n"
            << "            text = " << quote(iv.label) << " \n";
      }
    }
  }
  return out.str();
}

std::string serialize_textgrid_short(const TextGrid& grid) {
  std::ostringstream out;
  out << "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n"
      << format_seconds(grid.xmin) << "\n" << format_seconds(grid.xmax) << "\n";
  if (grid.tiers.empty()) {
    out << "<absent>\n";
    return out.str();
  }
  out << "<exists>\n" << grid.tiers.size() << "\n";
  for (const Tier& tier : grid.tiers) {
    const bool points = tier.kind == Tier::Kind::kPoint;
    out << quote(points ? "TextTier" : "IntervalTier") << "\n" << quote(tier.name) << "\n"
        << format_seconds(tier.xmin) << "\n" << format_seconds(tier.xmax) << "\n"
        << tier.intervals.size() << "\n";
    for (const TextInterval& iv : tier.intervals) {
      out << format_seconds(iv.start) << "\n";
      if (!points) out << format_seconds(iv.end) << "\n";
      out << quote(iv.label) << "\n";
    }
  }
  return out.str();
}

std::vector<PhoneInterval> extract_phone_intervals(const TextGrid& grid, std::string_view tier_selector,
                                                   std::string_view utterance_id,
                                                   const std::set<std::string>& silence_labels) {
  const Tier* tier = nullptr;
  for (const Tier& t : grid.tiers) {
    if (t.kind != Tier::Kind::kInterval) continue;
    const bool match = tier_selector.empty() ? lower(t.name).find("phone") != std::string::npos
                                             : t.name == tier_selector;
    if (match) {
      tier = &t;
      break;
    }
  }
  if (tier == nullptr) {
    fail(ErrorCode::kTierNotFound, tier_selector.empty()
                                       ? std::string("no interval tier name contains 'phone'")
                                       : "no interval tier named '" + std::string(tier_selector) + "'");
  }
  std::vector<PhoneInterval> out;
  out.reserve(tier->intervals.size());
  for (const TextInterval& iv : tier->intervals) {
    if (silence_labels.contains(iv.label)) continue;
    // whitespace-only labels count as empty
    if (std::all_of(iv.label.begin(), iv.label.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    out.push_back({iv.label, iv.start, iv.end, std::string(utterance_id)});
  }
  return out;
}

}  // namespace phonoprof
