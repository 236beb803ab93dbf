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

#include "embed_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "error.hpp"

namespace phonoprof {

namespace {

constexpr char kFrameMagic[4] = {'F', 'R', 'M', '1'};
constexpr char kTokenMagic[4] = {'P', 'E', 'T', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kFrameHeaderSize = 4 + 4 + 4 + 8 + 8;
constexpr std::size_t kTokenHeaderSize = 4 + 4 + 4 + 8;

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void str16(const std::string& s, const char* what) {
    if (s.size() > 0xFFFF) fail(ErrorCode::kInvalidArgument, std::string(what) + " longer than 65535 bytes");
    uint(static_cast<std::uint16_t>(s.size()));
    raw(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) fail(ErrorCode::kTruncatedFile, std::string("file truncated while reading ") + what);
  }
  template <typename U>
  U uint(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(uint<std::uint64_t>(what)); }
  float f32(const char* what) { return std::bit_cast<float>(uint<std::uint32_t>(what)); }
  std::string str16(const char* what) {
    const auto n = uint<std::uint16_t>(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool magic(const char (&m)[4]) {
    if (remaining() < 4) return false;
    const bool ok = std::memcmp(bytes_.data() + pos_, m, 4) == 0;
    pos_ += 4;
    return ok;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check_finite(std::span<const float> values, const char* what) {
  for (float v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, std::string(what) + " contains NaN or Inf");
  }
}

std::vector<std::uint8_t> slurp(std::istream& in) {
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::uint8_t> slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  return slurp(in);
}

void dump(const std::vector<std::uint8_t>& bytes, std::ostream& out) {
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed");
}

void dump_file(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot create '" + path + "'");
  dump(bytes, out);
}

template <typename F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace

FrameMatrix::FrameMatrix(std::uint32_t dim, double hop_seconds, std::vector<float> values)
    : dim_(dim), hop_(hop_seconds), values_(std::move(values)) {
  if (dim_ == 0) fail(ErrorCode::kDimMismatch, "frame dim must be at least 1");
  if (!(hop_ > 0.0) || !std::isfinite(hop_)) fail(ErrorCode::kInvalidArgument, "frame hop must be positive");
  if (values_.size() % dim_ != 0) fail(ErrorCode::kDimMismatch, "frame values are not a multiple of dim");
}

std::vector<double> pool_phone_embedding(const FrameMatrix& frames, double start, double end) {
  const std::size_t count = frames.frame_count();
  if (count == 0) fail(ErrorCode::kEmptyFrameMatrix, "no frames to pool");
  const double hop = frames.hop();
  const double audio_end = static_cast<double>(count) * hop;
  if (start > audio_end + hop || end < -hop || end < start) {
    fail(ErrorCode::kIntervalOutOfRange, "phone interval lies outside the frame range");
  }
  std::vector<double> sum(frames.dim(), 0.0);
  std::size_t used = 0;
  // First candidate: one frame before the centre that could reach `start`.
  const double first = std::floor(start / hop - 0.5) - 1.0;
  std::size_t f = first <= 0.0 ? 0 : static_cast<std::size_t>(first);
  for (; f < count; ++f) {
    const double c = frames.centre(f);
    if (c >= end) break;
    if (c < start) continue;
    const auto row = frames.frame(f);
    for (std::size_t d = 0; d < row.size(); ++d) sum[d] += row[d];
    ++used;
  }
  if (used == 0) {
    const double mid = 0.5 * (start + end);
    double guess = std::round(mid / hop - 0.5);
    guess = std::clamp(guess, 0.0, static_cast<double>(count - 1));
    std::size_t best = static_cast<std::size_t>(guess);
    // settle ties and rounding at the neighbours
    const std::size_t lo = best == 0 ? 0 : best - 1;
    const std::size_t hi = std::min(count - 1, best + 1);
    double best_dist = std::abs(frames.centre(best) - mid);
    for (std::size_t g = lo; g <= hi; ++g) {
      const double d = std::abs(frames.centre(g) - mid);
      if (d < best_dist || (d == best_dist && g < best)) {
        best = g;
        best_dist = d;
      }
    }
    const auto row = frames.frame(best);
    return std::vector<double>(row.begin(), row.end());
  }
  for (double& v : sum) v /= static_cast<double>(used);
  return sum;
}

std::vector<PhoneToken> pool_utterance(const FrameMatrix& frames, const std::vector<PhoneInterval>& intervals,
                                       const std::string& speaker_id) {
  std::vector<PhoneToken> tokens;
  tokens.reserve(intervals.size());
  std::uint32_t position = 0;
  for (const PhoneInterval& iv : intervals) {
    const std::vector<double> pooled = pool_phone_embedding(frames, iv);
    PhoneToken tok;
    tok.speaker_id = speaker_id;
    tok.utterance_id = iv.utterance_id;
    tok.phone = iv.phone;
    tok.start = iv.start;
    tok.end = iv.end;
    tok.position_index = position++;
    tok.embedding.assign(pooled.begin(), pooled.end());
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::vector<std::uint8_t> encode_frames(const FrameMatrix& frames) {
  if (frames.dim() == 0) fail(ErrorCode::kDimMismatch, "frame dim must be at least 1");
  check_finite(frames.values(), "frame matrix");
  ByteWriter w;
  w.reserve(kFrameHeaderSize + frames.values().size() * 4);
  w.raw(kFrameMagic, 4);
  w.uint<std::uint32_t>(kVersion);
  w.uint<std::uint32_t>(frames.dim());
  w.f64(frames.hop());
  w.uint<std::uint64_t>(frames.frame_count());
  for (float v : frames.values()) w.f32(v);
  return w.take();
}

FrameMatrix decode_frames(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.magic(kFrameMagic)) fail(ErrorCode::kBadMagic, "not an FRM1 file");
  const auto version = r.uint<std::uint32_t>("version");
  if (version != kVersion) fail(ErrorCode::kBadMagic, "unsupported FRM1 version " + std::to_string(version));
  const auto dim = r.uint<std::uint32_t>("dim");
  const double hop = r.f64("hop");
  const auto count = r.uint<std::uint64_t>("frame count");
  if (dim == 0) fail(ErrorCode::kDimMismatch, "FRM1 header declares dim 0");
  const unsigned __int128 expected = static_cast<unsigned __int128>(count) * dim * 4;
  if (expected > r.remaining()) fail(ErrorCode::kTruncatedFile, "FRM1 payload shorter than header declares");
  if (expected < r.remaining()) fail(ErrorCode::kDimMismatch, "FRM1 payload longer than header declares");
  std::vector<float> values(static_cast<std::size_t>(count) * dim);
  for (float& v : values) v = r.f32("frame value");
  return FrameMatrix(dim, hop, std::move(values));
}

void write_frames(const FrameMatrix& frames, std::ostream& sink) { dump(encode_frames(frames), sink); }
FrameMatrix read_frames(std::istream& source) { return decode_frames(slurp(source)); }

void write_frames_file(const FrameMatrix& frames, const std::string& path) {
  with_path(path, [&] { dump_file(encode_frames(frames), path); return 0; });
}

FrameMatrix read_frames_file(const std::string& path) {
  return with_path(path, [&] { return decode_frames(slurp_file(path)); });
}

std::vector<std::uint8_t> encode_tokens(const std::vector<PhoneToken>& tokens) {
  const std::size_t dim = tokens.empty() ? 0 : tokens.front().embedding.size();
  if (!tokens.empty() && dim == 0) fail(ErrorCode::kDimMismatch, "token embedding is empty");
  ByteWriter w;
  w.raw(kTokenMagic, 4);
  w.uint<std::uint32_t>(kVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(dim));
  w.uint<std::uint64_t>(tokens.size());
  for (const PhoneToken& t : tokens) {
    if (t.embedding.size() != dim) {
      fail(ErrorCode::kDimMismatch, "token embeddings have mixed dims (" + std::to_string(dim) + " vs " +
                                        std::to_string(t.embedding.size()) + ")");
    }
    if (!std::isfinite(t.start) || !std::isfinite(t.end)) fail(ErrorCode::kNonFinite, "token times must be finite");
    check_finite(t.embedding, "token embedding");
    w.str16(t.speaker_id, "speaker_id");
    w.str16(t.utterance_id, "utterance_id");
    w.str16(t.phone, "phone");
    w.f64(t.start);
    w.f64(t.end);
    w.uint<std::uint32_t>(t.position_index);
    for (float v : t.embedding) w.f32(v);
  }
  return w.take();
}

std::vector<PhoneToken> decode_tokens(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.magic(kTokenMagic)) fail(ErrorCode::kBadMagic, "not a PET1 file");
  const auto version = r.uint<std::uint32_t>("version");
  if (version != kVersion) fail(ErrorCode::kBadMagic, "unsupported PET1 version " + std::to_string(version));
  const auto dim = r.uint<std::uint32_t>("dim");
  const auto count = r.uint<std::uint64_t>("record count");
  if (count > 0 && dim == 0) fail(ErrorCode::kDimMismatch, "PET1 header declares dim 0 with records");
  // smallest possible record: three empty strings, times, position, payload
  const unsigned __int128 min_record = 6 + 16 + 4 + static_cast<unsigned __int128>(dim) * 4;
  if (min_record * count > r.remaining()) fail(ErrorCode::kTruncatedFile, "PET1 payload shorter than header declares");
  std::vector<PhoneToken> tokens(static_cast<std::size_t>(count));
  for (PhoneToken& t : tokens) {
    t.speaker_id = r.str16("speaker_id");
    t.utterance_id = r.str16("utterance_id");
    t.phone = r.str16("phone");
    t.start = r.f64("start");
    t.end = r.f64("end");
    t.position_index = r.uint<std::uint32_t>("position_index");
    t.embedding.resize(dim);
    for (float& v : t.embedding) v = r.f32("embedding");
  }
  if (r.remaining() != 0) fail(ErrorCode::kDimMismatch, "PET1 payload longer than header declares");
  return tokens;
}

void write_tokens(const std::vector<PhoneToken>& tokens, std::ostream& sink) { dump(encode_tokens(tokens), sink); }
std::vector<PhoneToken> read_tokens(std::istream& source) { return decode_tokens(slurp(source)); }

void write_tokens_file(const std::vector<PhoneToken>& tokens, const std::string& path) {
  with_path(path, [&] { dump_file(encode_tokens(tokens), path); return 0; });
}

std::vector<PhoneToken> read_tokens_file(const std::string& path) {
  return with_path(path, [&] { return decode_tokens(slurp_file(path)); });
}

}  // namespace phonoprof
