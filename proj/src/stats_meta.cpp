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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "error.hpp"
#include "stats.hpp"

namespace phonoprof::stats {

namespace {

struct Prepared {
  std::vector<double> z;
  std::vector<double> v;
};

Prepared prepare(std::span<const Effect> effects, std::size_t min_k) {
  if (effects.size() < min_k) {
    fail(ErrorCode::kTooFewStudies, "need at least " + std::to_string(min_k) + " studies, got " + std::to_string(effects.size()));
  }
  Prepared p;
  for (const Effect& e : effects) {
    if (e.n < 4) fail(ErrorCode::kInvalidArgument, "every study needs n >= 4");
    if (!std::isfinite(e.rho)) fail(ErrorCode::kInvalidArgument, "study correlation is not finite");
    if (std::abs(e.rho) >= 1.0) fail(ErrorCode::kDegenerateRho, "study correlation of magnitude 1 has no Fisher z");
    p.z.push_back(std::atanh(e.rho));
    p.v.push_back(1.0 / (static_cast<double>(e.n) - 3.0));
  }
  return p;
}

Interval back_transform(double centre, double half_width) {
  return {std::tanh(centre - half_width), std::tanh(centre + half_width)};
}

}  // namespace

MetaAnalysisResult dl_meta(std::span<const Effect> effects) {
  const Prepared p = prepare(effects, 2);
  const std::size_t k = effects.size();

  double sw = 0, sw2 = 0, swz = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 1.0 / p.v[i];
    sw += w;
    sw2 += w * w;
    swz += w * p.z[i];
  }
  const double z_fixed = swz / sw;
  double q = 0;
  for (std::size_t i = 0; i < k; ++i) q += (p.z[i] - z_fixed) * (p.z[i] - z_fixed) / p.v[i];
  const double df = static_cast<double>(k - 1);
  const double c = sw - sw2 / sw;

  MetaAnalysisResult m;
  m.k = k;
  m.q_stat = q;
  m.tau2 = std::max(0.0, (q - df) / c);
  m.i2 = q > 0.0 ? std::max(0.0, (q - df) / q) : 0.0;

  double sws = 0, swsz = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 1.0 / (p.v[i] + m.tau2);
    sws += w;
    swsz += w * p.z[i];
  }
  m.pooled_z = swsz / sws;
  m.pooled_rho = std::tanh(m.pooled_z);
  m.se = std::sqrt(1.0 / sws);
  m.dl_ci = back_transform(m.pooled_z, normal_quantile(0.975) * m.se);
  m.dl_p = std::erfc(std::abs(m.pooled_z / m.se) / std::numbers::sqrt2);

  std::tie(m.hksj_ci, m.hksj_p) = hksj_adjust(m, effects);
  if (k >= 3) m.prediction_interval = prediction_interval(m, effects);
  return m;
}

std::pair<Interval, double> hksj_adjust(const MetaAnalysisResult& meta, std::span<const Effect> effects) {
  const Prepared p = prepare(effects, 2);
  const std::size_t k = effects.size();
  double sws = 0, weighted = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 1.0 / (p.v[i] + meta.tau2);
    sws += w;
    weighted += w * (p.z[i] - meta.pooled_z) * (p.z[i] - meta.pooled_z);
  }
  const double df = static_cast<double>(k - 1);
  const double q = weighted / df;
  const double se = std::sqrt(q / sws);
  const double tcrit = student_t_quantile(0.975, df);
  const Interval ci = back_transform(meta.pooled_z, tcrit * se);
  double pval;
  if (se > 0.0) pval = student_t_two_sided_p(meta.pooled_z / se, df);
  else pval = meta.pooled_z == 0.0 ? 1.0 : 0.0;
  return {ci, pval};
}

Interval prediction_interval(const MetaAnalysisResult& meta, std::span<const Effect> effects) {
  prepare(effects, 3);
  const double df = static_cast<double>(effects.size() - 2);
  const double tcrit = student_t_quantile(0.975, df);
  return back_transform(meta.pooled_z, tcrit * std::sqrt(meta.tau2 + meta.se * meta.se));
}

}  // namespace phonoprof::stats
