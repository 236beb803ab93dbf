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
#include <numbers>
#include <numeric>

#include "error.hpp"
#include "stats.hpp"

namespace phonoprof::stats {

namespace {

void check_groups(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::kEmptyGroup, "both groups need at least one value");
  for (double v : a) if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "group value is not finite");
  for (double v : b) if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "group value is not finite");
}

// Number of ways to pick na of na+nb ranks with rank-sum statistic U = u, for
// every u in [0, na*nb].  Counts fit in a double exactly for na+nb <= 60.
std::vector<double> u_distribution(std::size_t na, std::size_t nb) {
  // dp[i][j][u]: arrangements of i a's and j b's with U = u, built by
  // appending the largest element.
  const std::size_t umax = na * nb;
  std::vector<std::vector<std::vector<double>>> dp(
      na + 1, std::vector<std::vector<double>>(nb + 1, std::vector<double>(umax + 1, 0.0)));
  for (std::size_t i = 0; i <= na; ++i) {
    for (std::size_t j = 0; j <= nb; ++j) {
      if (i == 0 || j == 0) {
        dp[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t u = 0; u <= i * j; ++u) {
        // largest is an a: it beats all j b's
        double v = u >= j ? dp[i - 1][j][u - j] : 0.0;
        // largest is a b: contributes nothing
        v += dp[i][j - 1][u];
        dp[i][j][u] = v;
      }
    }
  }
  return dp[na][nb];
}

}  // namespace

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  check_groups(a, b);
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto ranks = average_ranks(all);
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);

  MannWhitneyResult r;
  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb);
  r.u_a = rank_sum_a - dna * (dna + 1) / 2.0;
  r.u_b = dna * dnb - r.u_a;
  r.u = std::min(r.u_a, r.u_b);
  r.direction = r.u_a > r.u_b ? Dominance::kAGreater : r.u_a < r.u_b ? Dominance::kBGreater : Dominance::kEqual;

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    if (j - i > 1) ties = true;
    tie_term += t * t * t - t;
    i = j;
  }

  if (n <= 12 && !ties) {
    const auto dist = u_distribution(na, nb);
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    const auto u_min = static_cast<std::size_t>(std::llround(r.u));
    double tail = 0.0;
    for (std::size_t u = 0; u <= u_min; ++u) tail += dist[u];
    r.p_value = std::min(1.0, 2.0 * tail / total);
    r.exact = true;
    return r;
  }

  const double dn = static_cast<double>(n);
  const double mu = dna * dnb / 2.0;
  const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::abs(r.u_a - mu) - 0.5) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::numbers::sqrt2));
  return r;
}

double cliffs_delta(std::span<const double> a, std::span<const double> b) {
  check_groups(a, b);
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  double greater = 0.0, less = 0.0;
  for (double v : a) {
    greater += static_cast<double>(std::lower_bound(sb.begin(), sb.end(), v) - sb.begin());
    less += static_cast<double>(sb.end() - std::upper_bound(sb.begin(), sb.end(), v));
  }
  return (greater - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

RocResult roc(std::span<const double> scores, std::span<const std::uint8_t> labels, ScoreDirection direction) {
  if (scores.size() != labels.size()) fail(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) fail(ErrorCode::kInvalidArgument, "ROC score is not finite");
    (labels[i] ? pos : neg).push_back(scores[i]);
  }
  if (pos.empty() || neg.empty()) fail(ErrorCode::kSingleClass, "ROC needs both positive and negative samples");

  RocResult r;
  r.n_positive = pos.size();
  r.n_negative = neg.size();
  const double n1 = static_cast<double>(pos.size()), n0 = static_cast<double>(neg.size());

  // AUC through the rank-sum identity: P(pos ranks above neg) + ties / 2.
  std::vector<double> all(pos.begin(), pos.end());
  all.insert(all.end(), neg.begin(), neg.end());
  const auto ranks = average_ranks(all);
  const double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(pos.size()), 0.0);
  const double auc_higher = (rank_sum - n1 * (n1 + 1) / 2.0) / (n1 * n0);
  r.auc = direction == ScoreDirection::kHigherIsPositive ? auc_higher : 1.0 - auc_higher;

  // Youden's J over every distinct score used as a threshold.
  const bool higher = direction == ScoreDirection::kHigherIsPositive;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::vector<double> thresholds = all;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  bool have = false;
  for (double thr : thresholds) {
    double tp, fp;
    if (higher) {
      tp = static_cast<double>(pos.end() - std::lower_bound(pos.begin(), pos.end(), thr));
      fp = static_cast<double>(neg.end() - std::lower_bound(neg.begin(), neg.end(), thr));
    } else {
      tp = static_cast<double>(std::upper_bound(pos.begin(), pos.end(), thr) - pos.begin());
      fp = static_cast<double>(std::upper_bound(neg.begin(), neg.end(), thr) - neg.begin());
    }
    const double sens = tp / n1;
    const double spec = 1.0 - fp / n0;
    const double j = sens + spec - 1.0;
    if (!have || j > r.youden_j || (j == r.youden_j && spec > r.specificity)) {
      have = true;
      r.youden_j = j;
      r.optimal_threshold = thr;
      r.sensitivity = sens;
      r.specificity = spec;
    }
  }
  return r;
}

}  // namespace phonoprof::stats
