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

// Per-speaker phonological profile: d' along control-derived contrast
// directions plus three structural measures of the phone embedding sequence.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embed_io.hpp"
#include "error.hpp"
#include "feature_config.hpp"

namespace phonoprof {

inline constexpr std::size_t kMetricCount = 12;
inline constexpr std::size_t kBoundarySharpness = 9;
inline constexpr std::size_t kCrossPositionCosim = 10;
inline constexpr std::size_t kVowelTriangleArea = 11;

// Column names; indices 0..8 follow Feature.
const std::array<std::string, kMetricCount>& metric_names();

struct FeatureDirection {
  Feature feature = Feature::kNasality;
  std::vector<double> direction;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::string language;
};

// Class-mean accumulator so directions can be built speaker by speaker.
class DirectionAccumulator {
 public:
  DirectionAccumulator(const FeatureSpec& spec, bool normalize_symbols = false)
      : spec_(spec), normalize_(normalize_symbols) {}

  void add(std::span<const PhoneToken> tokens);
  // Throws InsufficientTokens (either class < min_per_class) or
  // DegenerateDirection (mean difference norm < 1e-12).
  FeatureDirection finish(const std::string& language, std::size_t min_per_class = 5) const;

 private:
  FeatureSpec spec_;
  bool normalize_;
  std::vector<double> sum_pos_, sum_neg_;
  std::size_t n_pos_ = 0, n_neg_ = 0;
};

FeatureDirection compute_direction(std::span<const PhoneToken> control_tokens, const FeatureSpec& spec,
                                   const std::string& language = "", std::size_t min_per_class = 5,
                                   bool normalize_symbols = false);

struct DPrimeResult {
  Feature feature = Feature::kNasality;
  double d_prime = 0.0;
  double mu_pos = 0.0;
  double mu_neg = 0.0;
  double pooled_sd = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// d' of two projection samples with the Bessel-corrected pooled SD.
DPrimeResult dprime_from_projections(std::span<const double> pos, std::span<const double> neg);

DPrimeResult dprime(std::span<const PhoneToken> tokens, const FeatureDirection& dir, const FeatureSpec& spec,
                    std::size_t min_tokens = 5, bool normalize_symbols = false);

// Key for the per-speaker, per-feature subsampling stream.
std::uint64_t subsample_key(std::uint64_t seed, const std::string& speaker_id, Feature feature);

// Mean d' over `reps` draws of exactly n_per_class tokens per class without
// replacement.  Throws Ineligible when a class is smaller than n_per_class.
double subsampled_dprime(std::span<const PhoneToken> tokens, const FeatureDirection& dir, const FeatureSpec& spec,
                         std::uint64_t stream_key, std::size_t n_per_class = 30, std::size_t reps = 100,
                         bool normalize_symbols = false);

// Tokens of one utterance in position order.
using Utterance = std::span<const PhoneToken>;

// Sorts tokens by (utterance_id, position_index) and returns one span per
// utterance over the sorted storage.
std::vector<Utterance> group_utterances(std::vector<PhoneToken>& tokens);

double cosine_similarity(std::span<const float> a, std::span<const float> b);
double boundary_sharpness(std::span<const Utterance> utterances);
double cross_position_cosim(std::span<const Utterance> utterances);

// Heron area from three side lengths, in the cancellation-safe ordering.
double heron_area(double a, double b, double c);
double vowel_triangle_area(std::span<const PhoneToken> tokens, const LanguageConfig& config,
                           std::size_t min_per_corner = 3);

std::vector<PhoneToken> filter_short_tokens(std::span<const PhoneToken> tokens, double min_duration = 0.030);

struct ProfileOptions {
  std::size_t min_tokens = 5;
  std::size_t corpus_min_tokens = 25;
  std::size_t subsample_n = 30;
  std::size_t subsample_reps = 100;
  std::uint64_t seed = 42;
  double min_duration = 0.0;  // 0 disables the duration filter
  // Also compute the subsampled and 30 ms-filtered d' variants.
  bool robustness_variants = true;
};

struct Metric {
  std::optional<double> value;
  ErrorCode reason = ErrorCode::kOk;  // why value is absent
};

struct SpeakerProfile {
  std::string speaker_id;
  std::string corpus;
  std::string language;
  std::string aetiology;
  std::string role;  // "control" or "patient"
  std::optional<int> severity;
  std::array<Metric, kMetricCount> metrics;
  // Robustness variants of the nine d' metrics: fixed-size subsampling and
  // the 30 ms duration filter.
  std::array<Metric, kFeatureCount> subsampled;
  std::array<Metric, kFeatureCount> filtered30;
  std::size_t n_phones = 0;
  std::size_t n_utterances = 0;
  double phones_per_utterance = 0.0;
  // Below the corpus-level token threshold; kept in the file, left out of analyses.
  bool excluded = false;
};

struct DirectionSlot {
  std::optional<FeatureDirection> direction;
  ErrorCode reason = ErrorCode::kOk;  // why direction is absent
};
using DirectionSet = std::array<DirectionSlot, kFeatureCount>;

// Metric failures are recorded per metric; the function itself only throws
// on programming errors.  Identity fields other than speaker_id are left for
// the caller.
SpeakerProfile speaker_profile(const std::string& speaker_id, std::vector<PhoneToken> tokens,
                               const DirectionSet& directions,
                               const LanguageConfig& config, const ProfileOptions& options);

}  // namespace phonoprof
