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

// Frame-embedding (.frm) and phone-token (.pet) files, and phone pooling.
//
// FRM1 layout (little-endian):
//   "FRM1" | u32 version=1 | u32 dim | f64 hop_seconds | u64 frame_count |
//   frame_count*dim float32, row-major
// PET1 layout (little-endian):
//   "PET1" | u32 version=1 | u32 dim | u64 record_count | records...
//   record: u16 len + UTF-8 speaker_id | u16 len + utterance_id |
//           u16 len + phone | f64 start | f64 end | u32 position_index |
//           dim float32

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "textgrid.hpp"

namespace phonoprof {

class FrameMatrix {
 public:
  FrameMatrix() = default;
  FrameMatrix(std::uint32_t dim, double hop_seconds, std::vector<float> values);

  std::uint32_t dim() const { return dim_; }
  double hop() const { return hop_; }
  std::size_t frame_count() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::span<const float> frame(std::size_t f) const {
    return std::span<const float>(values_).subspan(f * dim_, dim_);
  }
  const std::vector<float>& values() const { return values_; }
  // Centre of frame f is at (f + 0.5) * hop.
  double centre(std::size_t f) const { return (static_cast<double>(f) + 0.5) * hop_; }

  bool operator==(const FrameMatrix&) const = default;

 private:
  std::uint32_t dim_ = 0;
  double hop_ = 0.0;
  std::vector<float> values_;
};

struct PhoneToken {
  std::string speaker_id;
  std::string utterance_id;
  std::string phone;
  double start = 0.0;
  double end = 0.0;
  std::uint32_t position_index = 0;
  std::vector<float> embedding;

  double duration() const { return end - start; }
  bool operator==(const PhoneToken&) const = default;
};

// Mean of frames whose centre lies in [start, end); when none does, the frame
// whose centre is nearest the interval midpoint (lower index on ties).
std::vector<double> pool_phone_embedding(const FrameMatrix& frames, double start, double end);
inline std::vector<double> pool_phone_embedding(const FrameMatrix& frames, const PhoneInterval& iv) {
  return pool_phone_embedding(frames, iv.start, iv.end);
}

// Pools every interval of one utterance into tokens (position_index in order).
std::vector<PhoneToken> pool_utterance(const FrameMatrix& frames, const std::vector<PhoneInterval>& intervals,
                                       const std::string& speaker_id);

std::vector<std::uint8_t> encode_frames(const FrameMatrix& frames);
FrameMatrix decode_frames(std::span<const std::uint8_t> bytes);
void write_frames(const FrameMatrix& frames, std::ostream& sink);
FrameMatrix read_frames(std::istream& source);
void write_frames_file(const FrameMatrix& frames, const std::string& path);
FrameMatrix read_frames_file(const std::string& path);

std::vector<std::uint8_t> encode_tokens(const std::vector<PhoneToken>& tokens);
std::vector<PhoneToken> decode_tokens(std::span<const std::uint8_t> bytes);
void write_tokens(const std::vector<PhoneToken>& tokens, std::ostream& sink);
std::vector<PhoneToken> read_tokens(std::istream& source);
void write_tokens_file(const std::vector<PhoneToken>& tokens, const std::string& path);
std::vector<PhoneToken> read_tokens_file(const std::string& path);

}  // namespace phonoprof
