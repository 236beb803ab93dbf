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
#include <numeric>

#include "error.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace phonoprof::stats {

namespace {

void check_pairs(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) fail(ErrorCode::kInvalidArgument, "x and y differ in length");
  if (x.size() < min_n) {
    fail(ErrorCode::kTooFewPairs, "need at least " + std::to_string(min_n) + " pairs, got " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorCode::kInvalidArgument, "correlation input is not finite");
  }
}

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

double t_test_p(double r, std::size_t n, std::size_t lost_df) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - lost_df);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  return student_t_two_sided_p(t, df);
}

// Pearson that reports zero variance instead of dividing by it.
double pearson_checked(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) fail(ErrorCode::kConstantInput, "input has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double statistic(CorrelationMethod method, std::span<const double> x, std::span<const double> y) {
  return method == CorrelationMethod::kKendall ? kendall_tau(x, y).coefficient : spearman(x, y).coefficient;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 share 1-based ranks i+1..j
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y, 2);
  return pearson_checked(x, y);
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y, 3);
  if (is_constant(x) || is_constant(y)) fail(ErrorCode::kConstantInput, "spearman input is constant");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  CorrelationResult r;
  r.method = CorrelationMethod::kSpearman;
  r.n = x.size();
  r.coefficient = pearson_checked(rx, ry);
  r.p_value = t_test_p(r.coefficient, r.n, 2);
  return r;
}

CorrelationResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y, 3);
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      const double s = dx * dy;
      if (s > 0) ++concordant;
      else if (s < 0) ++discordant;
    }
  }
  // tie groups
  auto tie_sums = [](std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    double pairs = 0, v1 = 0, v2 = 0, v3 = 0;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] == s[i]) ++j;
      const double t = static_cast<double>(j - i);
      pairs += t * (t - 1) / 2;
      v1 += t * (t - 1) * (2 * t + 5);
      v2 += t * (t - 1);
      v3 += t * (t - 1) * (t - 2);
      i = j;
    }
    return std::array<double, 4>{pairs, v1, v2, v3};
  };
  const auto tx = tie_sums(x);
  const auto ty = tie_sums(y);
  const double nd = static_cast<double>(n);
  const double n0 = nd * (nd - 1) / 2;
  if (tx[0] == n0 || ty[0] == n0) fail(ErrorCode::kConstantInput, "kendall input is constant");

  const double s = static_cast<double>(concordant - discordant);
  CorrelationResult r;
  r.method = CorrelationMethod::kKendall;
  r.n = n;
  r.coefficient = std::clamp(s / std::sqrt((n0 - tx[0]) * (n0 - ty[0])), -1.0, 1.0);
  const double var_s = (nd * (nd - 1) * (2 * nd + 5) - tx[1] - ty[1]) / 18.0 +
                       tx[2] * ty[2] / (2.0 * nd * (nd - 1)) +
                       tx[3] * ty[3] / (9.0 * nd * (nd - 1) * (nd - 2));
  r.p_value = var_s > 0.0 ? std::erfc(std::abs(s) / std::sqrt(var_s) / std::numbers::sqrt2) : 1.0;
  r.p_value = std::min(1.0, r.p_value);
  return r;
}

CorrelationResult partial_spearman(std::span<const double> x, std::span<const double> y, std::span<const double> z) {
  check_pairs(x, y, 4);
  check_pairs(x, z, 4);
  if (is_constant(x) || is_constant(y) || is_constant(z)) fail(ErrorCode::kConstantInput, "partial spearman input is constant");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto rz = average_ranks(z);
  const double rxy = pearson_checked(rx, ry);
  const double rxz = pearson_checked(rx, rz);
  const double ryz = pearson_checked(ry, rz);
  constexpr double kLimit = 1.0 - 1e-12;
  if (std::abs(rxz) > kLimit || std::abs(ryz) > kLimit) {
    fail(ErrorCode::kNearSingular, "control variable is rank-collinear with an input");
  }
  CorrelationResult r;
  r.method = CorrelationMethod::kPartialSpearman;
  r.n = x.size();
  r.coefficient = std::clamp((rxy - rxz * ryz) / std::sqrt((1 - rxz * rxz) * (1 - ryz * ryz)), -1.0, 1.0);
  r.p_value = t_test_p(r.coefficient, r.n, 3);
  return r;
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::kInvalidArgument, "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapCI bootstrap_ci(std::span<const double> x, std::span<const double> y, CorrelationMethod method,
                         std::size_t iterations, std::uint64_t seed) {
  if (method == CorrelationMethod::kPartialSpearman) {
    fail(ErrorCode::kInvalidArgument, "bootstrap supports spearman and kendall only");
  }
  check_pairs(x, y, 3);
  BootstrapCI ci;
  ci.point = statistic(method, x, y);
  ci.iterations = iterations;
  ci.seed = seed;

  const std::size_t n = x.size();
  std::vector<double> values;
  values.reserve(iterations);
  std::vector<double> bx(n), by(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(it)));
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(rng.next_below(n));
        bx[i] = x[j];
        by[i] = y[j];
      }
      ok = !is_constant(bx) && !is_constant(by);
    }
    if (!ok) {
      ++ci.skipped;
      continue;
    }
    values.push_back(statistic(method, bx, by));
  }
  if (values.empty()) fail(ErrorCode::kConstantInput, "every bootstrap resample was constant");
  std::sort(values.begin(), values.end());
  ci.lower = sorted_quantile(values, 0.025);
  ci.upper = sorted_quantile(values, 0.975);
  return ci;
}

std::vector<double> bh_fdr(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidP, "p-values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double candidate = p_values[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, candidate);
    adjusted[order[r]] = std::min(1.0, running);
  }
  return adjusted;
}

}  // namespace phonoprof::stats
