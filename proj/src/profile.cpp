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

#include "profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rng.hpp"

namespace phonoprof {

namespace {

double project(std::span<const float> embedding, const std::vector<double>& direction) {
  double s = 0.0;
  for (std::size_t d = 0; d < embedding.size(); ++d) s += static_cast<double>(embedding[d]) * direction[d];
  return s;
}

void split_projections(std::span<const PhoneToken> tokens, const FeatureDirection& dir, const FeatureSpec& spec,
                       bool normalize, std::vector<double>& pos, std::vector<double>& neg) {
  for (const PhoneToken& t : tokens) {
    const TokenClass cls = classify_token(t.phone, spec, normalize);
    if (cls == TokenClass::kNeither) continue;
    if (t.embedding.size() != dir.direction.size()) {
      fail(ErrorCode::kDimMismatch, "token dim does not match the feature direction");
    }
    (cls == TokenClass::kPositive ? pos : neg).push_back(project(t.embedding, dir.direction));
  }
}

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sum_sq_dev(std::span<const double> v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

template <typename F>
Metric capture(F&& f) {
  try {
    return {f(), ErrorCode::kOk};
  } catch (const Error& e) {
    return {std::nullopt, e.code()};
  }
}

}  // namespace

const std::array<std::string, kMetricCount>& metric_names() {
  static const std::array<std::string, kMetricCount> names = {
      "nasality", "voicing", "stridency", "sonorance", "manner", "high", "low", "back", "round",
      "boundary_sharpness", "cross_position_cosim", "vowel_triangle_area"};
  return names;
}

void DirectionAccumulator::add(std::span<const PhoneToken> tokens) {
  for (const PhoneToken& t : tokens) {
    const TokenClass cls = classify_token(t.phone, spec_, normalize_);
    if (cls == TokenClass::kNeither) continue;
    if (sum_pos_.empty()) {
      sum_pos_.assign(t.embedding.size(), 0.0);
      sum_neg_.assign(t.embedding.size(), 0.0);
    }
    if (t.embedding.size() != sum_pos_.size()) fail(ErrorCode::kDimMismatch, "control tokens have mixed dims");
    auto& sum = cls == TokenClass::kPositive ? sum_pos_ : sum_neg_;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += t.embedding[d];
    ++(cls == TokenClass::kPositive ? n_pos_ : n_neg_);
  }
}

FeatureDirection DirectionAccumulator::finish(const std::string& language, std::size_t min_per_class) const {
  const std::string name(feature_name(spec_.feature));
  if (n_pos_ < min_per_class || n_neg_ < min_per_class) {
    fail(ErrorCode::kInsufficientTokens, name + " direction needs " + std::to_string(min_per_class) +
                                             " tokens per class (have " + std::to_string(n_pos_) + "/" +
                                             std::to_string(n_neg_) + ")");
  }
  FeatureDirection out;
  out.feature = spec_.feature;
  out.language = language;
  out.n_positive = n_pos_;
  out.n_negative = n_neg_;
  out.direction.resize(sum_pos_.size());
  double norm2 = 0.0;
  for (std::size_t d = 0; d < sum_pos_.size(); ++d) {
    out.direction[d] = sum_pos_[d] / static_cast<double>(n_pos_) - sum_neg_[d] / static_cast<double>(n_neg_);
    norm2 += out.direction[d] * out.direction[d];
  }
  const double norm = std::sqrt(norm2);
  if (!(norm >= 1e-12)) fail(ErrorCode::kDegenerateDirection, name + " class means coincide");
  for (double& v : out.direction) v /= norm;
  return out;
}

FeatureDirection compute_direction(std::span<const PhoneToken> control_tokens, const FeatureSpec& spec,
                                   const std::string& language, std::size_t min_per_class, bool normalize_symbols) {
  DirectionAccumulator acc(spec, normalize_symbols);
  acc.add(control_tokens);
  return acc.finish(language, min_per_class);
}

DPrimeResult dprime_from_projections(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty() || pos.size() + neg.size() < 3) {
    fail(ErrorCode::kInsufficientTokens, "d' needs tokens in both classes");
  }
  DPrimeResult r;
  r.n_pos = pos.size();
  r.n_neg = neg.size();
  r.mu_pos = mean_of(pos);
  r.mu_neg = mean_of(neg);
  const double pooled_var = (sum_sq_dev(pos, r.mu_pos) + sum_sq_dev(neg, r.mu_neg)) /
                            static_cast<double>(pos.size() + neg.size() - 2);
  r.pooled_sd = std::sqrt(pooled_var);
  if (!(r.pooled_sd >= 1e-12)) fail(ErrorCode::kZeroVariance, "pooled standard deviation is zero");
  r.d_prime = (r.mu_pos - r.mu_neg) / r.pooled_sd;
  return r;
}

DPrimeResult dprime(std::span<const PhoneToken> tokens, const FeatureDirection& dir, const FeatureSpec& spec,
                    std::size_t min_tokens, bool normalize_symbols) {
  std::vector<double> pos, neg;
  split_projections(tokens, dir, spec, normalize_symbols, pos, neg);
  if (pos.size() < min_tokens || neg.size() < min_tokens) {
    fail(ErrorCode::kInsufficientTokens, std::string(feature_name(spec.feature)) + " d' needs " +
                                             std::to_string(min_tokens) + " tokens per class");
  }
  DPrimeResult r = dprime_from_projections(pos, neg);
  r.feature = spec.feature;
  return r;
}

std::uint64_t subsample_key(std::uint64_t seed, const std::string& speaker_id, Feature feature) {
  return derive_key(derive_key(seed, speaker_id), feature_name(feature));
}

double subsampled_dprime(std::span<const PhoneToken> tokens, const FeatureDirection& dir, const FeatureSpec& spec,
                         std::uint64_t stream_key, std::size_t n_per_class, std::size_t reps, bool normalize_symbols) {
  if (n_per_class < 2 || reps == 0) fail(ErrorCode::kInvalidArgument, "subsampling needs n_per_class >= 2 and reps >= 1");
  std::vector<double> pos, neg;
  split_projections(tokens, dir, spec, normalize_symbols, pos, neg);
  if (pos.size() < n_per_class || neg.size() < n_per_class) {
    fail(ErrorCode::kIneligible, std::string(feature_name(spec.feature)) + " has fewer than " +
                                     std::to_string(n_per_class) + " tokens in a class");
  }
  CounterRng rng(stream_key);
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    rng.partial_shuffle(pos, n_per_class);
    rng.partial_shuffle(neg, n_per_class);
    try {
      total += dprime_from_projections(std::span<const double>(pos).first(n_per_class),
                                       std::span<const double>(neg).first(n_per_class)).d_prime;
      ++used;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroVariance) throw;
    }
  }
  if (used == 0) fail(ErrorCode::kZeroVariance, "every subsample had zero variance");
  return total / static_cast<double>(used);
}

std::vector<Utterance> group_utterances(std::vector<PhoneToken>& tokens) {
  std::stable_sort(tokens.begin(), tokens.end(), [](const PhoneToken& a, const PhoneToken& b) {
    if (a.utterance_id != b.utterance_id) return a.utterance_id < b.utterance_id;
    return a.position_index < b.position_index;
  });
  std::vector<Utterance> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t j = i + 1;
    while (j < tokens.size() && tokens[j].utterance_id == tokens[i].utterance_id) ++j;
    out.push_back(std::span<const PhoneToken>(tokens).subspan(i, j - i));
    i = j;
  }
  return out;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) fail(ErrorCode::kDimMismatch, "cosine of vectors with different dims");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    ab += static_cast<double>(a[d]) * b[d];
    aa += static_cast<double>(a[d]) * a[d];
    bb += static_cast<double>(b[d]) * b[d];
  }
  if (aa <= 0.0 || bb <= 0.0) fail(ErrorCode::kZeroVariance, "cosine with a zero vector");
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

double boundary_sharpness(std::span<const Utterance> utterances) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (const Utterance& u : utterances) {
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      total += cosine_similarity(u[i].embedding, u[i + 1].embedding);
      ++pairs;
    }
  }
  if (pairs == 0) fail(ErrorCode::kNoTransitions, "no utterance has two or more phones");
  return total / static_cast<double>(pairs);
}

double cross_position_cosim(std::span<const Utterance> utterances) {
  // per interior token: mean of its two neighbour similarities; then the mean
  // over all interior tokens
  double total = 0.0;
  std::size_t interior = 0;
  for (const Utterance& u : utterances) {
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
      total += 0.5 * (cosine_similarity(u[i].embedding, u[i - 1].embedding) +
                      cosine_similarity(u[i].embedding, u[i + 1].embedding));
      ++interior;
    }
  }
  if (interior == 0) fail(ErrorCode::kNoInteriorTokens, "no utterance has three or more phones");
  return total / static_cast<double>(interior);
}

double heron_area(double a, double b, double c) {
  std::array<double, 3> s = {a, b, c};
  std::sort(s.begin(), s.end(), std::greater<>());
  const double x = s[0], y = s[1], z = s[2];
  const double prod = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  return 0.25 * std::sqrt(std::max(0.0, prod));
}

double vowel_triangle_area(std::span<const PhoneToken> tokens, const LanguageConfig& config, std::size_t min_per_corner) {
  std::array<std::vector<double>, 3> centroid;
  std::array<std::size_t, 3> count{};
  for (const PhoneToken& t : tokens) {
    const auto corner = config.corner_of(t.phone);
    if (!corner) continue;
    auto& c = centroid[*corner];
    if (c.empty()) c.assign(t.embedding.size(), 0.0);
    if (c.size() != t.embedding.size()) fail(ErrorCode::kDimMismatch, "corner vowel tokens have mixed dims");
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += t.embedding[d];
    ++count[*corner];
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (count[k] < min_per_corner) {
      static constexpr const char* kNames[] = {"/i/", "/a/", "/u/"};
      fail(ErrorCode::kInsufficientCornerTokens, std::string(kNames[k]) + " has " + std::to_string(count[k]) +
                                                     " tokens; need " + std::to_string(min_per_corner));
    }
    for (double& v : centroid[k]) v /= static_cast<double>(count[k]);
  }
  if (centroid[0].size() != centroid[1].size() || centroid[0].size() != centroid[2].size()) {
    fail(ErrorCode::kDimMismatch, "corner vowel tokens have mixed dims");
  }
  auto dist = [](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t d = 0; d < p.size(); ++d) s += (p[d] - q[d]) * (p[d] - q[d]);
    return std::sqrt(s);
  };
  return heron_area(dist(centroid[0], centroid[1]), dist(centroid[1], centroid[2]), dist(centroid[0], centroid[2]));
}

std::vector<PhoneToken> filter_short_tokens(std::span<const PhoneToken> tokens, double min_duration) {
  std::vector<PhoneToken> out;
  out.reserve(tokens.size());
  for (const PhoneToken& t : tokens) {
    if (t.duration() >= min_duration) out.push_back(t);
  }
  return out;
}

SpeakerProfile speaker_profile(const std::string& speaker_id, std::vector<PhoneToken> tokens,
                               const DirectionSet& directions, const LanguageConfig& config,
                               const ProfileOptions& options) {
  if (options.min_duration > 0.0) tokens = filter_short_tokens(tokens, options.min_duration);
  const auto utterances = group_utterances(tokens);

  SpeakerProfile p;
  p.speaker_id = speaker_id;
  p.language = config.language;
  p.n_phones = tokens.size();
  p.n_utterances = utterances.size();
  p.phones_per_utterance = p.n_utterances ? static_cast<double>(p.n_phones) / static_cast<double>(p.n_utterances) : 0.0;
  p.excluded = p.n_phones < options.corpus_min_tokens;

  std::vector<PhoneToken> filtered;
  if (options.robustness_variants) filtered = filter_short_tokens(tokens, 0.030);

  for (Feature f : kAllFeatures) {
    const auto idx = static_cast<std::size_t>(f);
    const DirectionSlot& slot = directions[idx];
    const FeatureSpec& spec = config.spec(f);
    if (!slot.direction) {
      p.metrics[idx] = {std::nullopt, slot.reason == ErrorCode::kOk ? ErrorCode::kInsufficientTokens : slot.reason};
      p.subsampled[idx] = p.filtered30[idx] = p.metrics[idx];
      continue;
    }
    const FeatureDirection& dir = *slot.direction;
    p.metrics[idx] = capture([&] { return dprime(tokens, dir, spec, options.min_tokens, config.normalize_symbols).d_prime; });
    if (options.robustness_variants) {
      p.subsampled[idx] = capture([&] {
        return subsampled_dprime(tokens, dir, spec, subsample_key(options.seed, speaker_id, f), options.subsample_n,
                                 options.subsample_reps, config.normalize_symbols);
      });
      p.filtered30[idx] = capture([&] {
        return dprime(filtered, dir, spec, options.min_tokens, config.normalize_symbols).d_prime;
      });
    }
  }
  p.metrics[kBoundarySharpness] = capture([&] { return boundary_sharpness(utterances); });
  p.metrics[kCrossPositionCosim] = capture([&] { return cross_position_cosim(utterances); });
  p.metrics[kVowelTriangleArea] = capture([&] { return vowel_triangle_area(tokens, config); });
  return p;
}

}  // namespace phonoprof
