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

// Brute-force reference implementations used by the unit tests and the
// acceptance runner.  They share no code with the library: ranks come from
// counting, pair statistics from enumerating every pair, and the exact
// Mann-Whitney null from enumerating every labelling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

// rank_i = #{j : v_j < v_i} + (#{j : v_j == v_i} + 1) / 2
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) less += 1;
      else if (w == v[i]) equal += 1;
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

// tau-b = (C - D) / sqrt((n0 - tx)(n0 - ty)) with tx, ty the pairs tied in x, y.
inline double kendall_b(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0, n0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      n0 += 1;
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0) tx += 1;
      if (dy == 0) ty += 1;
      if (dx * dy > 0) c += 1;
      if (dx * dy < 0) d += 1;
    }
  }
  return (c - d) / std::sqrt((n0 - tx) * (n0 - ty));
}

// Pairs with a > b, ties counted half.
inline double u_count(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double va : a) {
    for (double vb : b) u += va > vb ? 1.0 : va == vb ? 0.5 : 0.0;
  }
  return u;
}

// Two-sided exact p = 2 P(U <= u_min) by enumerating every way to label
// na of the pooled values as group a.  Assumes no ties.
inline double mann_whitney_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double u_obs = std::min(u_count(a, b), u_count(b, a));
  double total = 0, tail = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
    std::vector<double> ga, gb;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? ga : gb).push_back(pooled[i]);
    total += 1;
    if (u_count(ga, gb) <= u_obs + 1e-12) tail += 1;
  }
  return std::min(1.0, 2 * tail / total);
}

inline double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (double va : a) {
    for (double vb : b) s += va > vb ? 1 : va < vb ? -1 : 0;
  }
  return s / static_cast<double>(a.size() * b.size());
}

// adj_i = min(1, min over p_j >= p_i of m p_j / #{k : p_k <= p_j})
inline std::vector<double> bh(const std::vector<double>& p) {
  const double m = static_cast<double>(p.size());
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double best = 1.0;
    for (double pj : p) {
      if (pj < p[i]) continue;
      double rank = 0;
      for (double pk : p) rank += pk <= pj ? 1 : 0;
      best = std::min(best, m * pj / rank);
    }
    out[i] = best;
  }
  return out;
}

// P(score_pos > score_neg) + P(tie) / 2, higher score = positive.
inline double auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1;
      wins += scores[i] > scores[j] ? 1 : scores[i] == scores[j] ? 0.5 : 0;
    }
  }
  return wins / pairs;
}

inline double shoelace(double x1, double y1, double x2, double y2, double x3, double y3) {
  return 0.5 * std::abs(x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2));
}

// DerSimonian-Laird written out one quantity at a time, as a spreadsheet would.
struct Meta {
  double tau2, i2, q, pooled_z, pooled_rho, se, dl_lower, dl_upper, hksj_lower, hksj_upper, pi_lower, pi_upper;
};

// Critical values from tables: z_0.975 and t_0.975 for df 1..3.
inline constexpr double kZ975 = 1.959963984540054;
inline constexpr double kT975[4] = {0.0, 12.706204736174703, 4.302652729749464, 3.182446305284263};

inline Meta dersimonian_laird(const std::vector<double>& rho, const std::vector<double>& n) {
  const std::size_t k = rho.size();
  std::vector<double> z(k), v(k), w(k);
  for (std::size_t i = 0; i < k; ++i) {
    z[i] = 0.5 * std::log((1 + rho[i]) / (1 - rho[i]));
    v[i] = 1 / (n[i] - 3);
    w[i] = 1 / v[i];
  }
  const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
  double sum_w2 = 0, sum_wz = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sum_w2 += w[i] * w[i];
    sum_wz += w[i] * z[i];
  }
  const double z_fe = sum_wz / sum_w;
  double q = 0;
  for (std::size_t i = 0; i < k; ++i) q += w[i] * (z[i] - z_fe) * (z[i] - z_fe);
  const double df = static_cast<double>(k) - 1;
  Meta m{};
  m.q = q;
  m.tau2 = std::max(0.0, (q - df) / (sum_w - sum_w2 / sum_w));
  m.i2 = q > 0 ? std::max(0.0, (q - df) / q) : 0.0;
  double sum_ws = 0, sum_wsz = 0;
  std::vector<double> ws(k);
  for (std::size_t i = 0; i < k; ++i) {
    ws[i] = 1 / (v[i] + m.tau2);
    sum_ws += ws[i];
    sum_wsz += ws[i] * z[i];
  }
  m.pooled_z = sum_wsz / sum_ws;
  m.pooled_rho = std::tanh(m.pooled_z);
  m.se = std::sqrt(1 / sum_ws);
  m.dl_lower = std::tanh(m.pooled_z - kZ975 * m.se);
  m.dl_upper = std::tanh(m.pooled_z + kZ975 * m.se);
  double hk = 0;
  for (std::size_t i = 0; i < k; ++i) hk += ws[i] * (z[i] - m.pooled_z) * (z[i] - m.pooled_z);
  const double se_hk = std::sqrt(hk / df / sum_ws);
  m.hksj_lower = std::tanh(m.pooled_z - kT975[k - 1] * se_hk);
  m.hksj_upper = std::tanh(m.pooled_z + kT975[k - 1] * se_hk);
  if (k >= 3) {
    const double half = kT975[k - 2] * std::sqrt(m.tau2 + m.se * m.se);
    m.pi_lower = std::tanh(m.pooled_z - half);
    m.pi_upper = std::tanh(m.pooled_z + half);
  }
  return m;
}

}  // namespace oracle
