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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "test_util.hpp"

using namespace phonoprof;
using namespace phonoprof::stats;
using testutil::error_of;

namespace {

// Small integers so that ties happen often.
std::vector<double> draw(CounterRng& rng, std::size_t n, std::uint64_t range) {
  std::vector<double> v(n);
  for (double& x : v) x = static_cast<double>(rng.next_below(range));
  return v;
}

std::vector<double> distinct(CounterRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_gaussian();
  return v;
}

bool constant(const std::vector<double>& v) {
  for (double x : v) if (x != v[0]) return false;
  return true;
}

}  // namespace

TEST_CASE("quantiles") {
  CHECK(std::abs(normal_quantile(0.975) - 1.959964) < 1e-5);
  CHECK(std::abs(student_t_quantile(0.975, 1) - 12.7062) < 1e-3);
  CHECK(std::abs(student_t_quantile(0.975, 2) - 4.302653) < 1e-5);
  for (double df : {1.0, 3.0, 30.0}) CHECK(student_t_quantile(0.5, df) == 0.0);
  CHECK(normal_quantile(0.5) == 0.0);
  // df = 1 is Cauchy: F(t) = 1/2 + atan(t)/pi
  for (double p : {0.6, 0.9, 0.99}) {
    CHECK(student_t_quantile(p, 1) == doctest::Approx(std::tan(std::numbers::pi * (p - 0.5))).epsilon(1e-9));
  }
  for (double x : {-3.0, -0.5, 0.0, 1.2, 4.0}) CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  CHECK(error_of([] { normal_quantile(1.0); }) == ErrorCode::kOutOfDomain);
  CHECK(student_t_two_sided_p(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("Spearman examples") {
  const std::vector<double> x = {1, 2, 3, 4}, y = {2, 1, 4, 3}, inc = {10, 20, 30, 40};
  CHECK(spearman(x, y).coefficient == doctest::Approx(0.6));
  CHECK(spearman(x, inc).coefficient == doctest::Approx(1.0));
  const std::vector<double> c = {5, 5, 5, 5};
  CHECK(error_of([&] { spearman(x, c); }) == ErrorCode::kConstantInput);
  const std::vector<double> two = {1, 2};
  CHECK(error_of([&] { spearman(two, two); }) == ErrorCode::kTooFewPairs);
  const std::vector<double> nan = {1, 2, NAN, 4};
  CHECK(error_of([&] { spearman(x, nan); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("Kendall examples") {
  const std::vector<double> x = {1, 2, 3, 4};
  CHECK(kendall_tau(x, x).coefficient == doctest::Approx(1.0));
  // one discordant pair of six: (5 - 1) / 6
  const std::vector<double> y = {1, 2, 4, 3};
  CHECK(kendall_tau(x, y).coefficient == doctest::Approx(4.0 / 6.0));
  const std::vector<double> c = {2, 2, 2, 2};
  CHECK(error_of([&] { kendall_tau(c, y); }) == ErrorCode::kConstantInput);
}

TEST_CASE("rank statistics against enumeration") {
  CounterRng rng(777);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 3 + rng.next_below(8);
    const auto x = draw(rng, n, 6), y = draw(rng, n, 6);
    if (constant(x) || constant(y)) continue;
    ++checked;
    REQUIRE(std::abs(spearman(x, y).coefficient - oracle::spearman(x, y)) < 1e-9);
    REQUIRE(std::abs(kendall_tau(x, y).coefficient - oracle::kendall_b(x, y)) < 1e-9);
    const auto r = average_ranks(x);
    REQUIRE(r == oracle::ranks(x));
  }
  CHECK(checked > 150);
}

TEST_CASE("partial Spearman") {
  CounterRng rng(12);
  const std::size_t n = 300;
  std::vector<double> x(n), y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.next_gaussian();
    y[i] = x[i] + rng.next_gaussian();
    z[i] = rng.next_gaussian();
  }
  CHECK(std::abs(partial_spearman(x, y, z).coefficient - spearman(x, y).coefficient) < 0.05);
  CHECK(error_of([&] { partial_spearman(x, y, y); }) == ErrorCode::kNearSingular);
  // x = y: both correlate equally with z, partial is 1
  CHECK(partial_spearman(x, x, z).coefficient == doctest::Approx(1.0));
  // closed form on ranks: (r_xy - r_xz r_yz) / sqrt((1 - r_xz^2)(1 - r_yz^2))
  const double rxy = oracle::spearman(x, y), rxz = oracle::spearman(x, z), ryz = oracle::spearman(y, z);
  CHECK(partial_spearman(x, y, z).coefficient ==
        doctest::Approx((rxy - rxz * ryz) / std::sqrt((1 - rxz * rxz) * (1 - ryz * ryz))).epsilon(1e-9));
}

TEST_CASE("bootstrap intervals") {
  std::vector<double> x(20), y(20);
  for (int i = 0; i < 20; ++i) x[i] = y[i] = i;
  const auto perfect = bootstrap_ci(x, y);
  CHECK(perfect.lower == doctest::Approx(1.0));
  CHECK(perfect.upper == doctest::Approx(1.0));

  CounterRng rng(5);
  auto sample = [&](std::size_t n) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.next_gaussian();
      b[i] = 0.58 * a[i] + 0.81 * rng.next_gaussian();
    }
    return std::pair{a, b};
  };
  const auto [a50, b50] = sample(50);
  const auto [a500, b500] = sample(500);
  const auto ci50 = bootstrap_ci(a50, b50, CorrelationMethod::kSpearman, 1000, 42);
  const auto ci500 = bootstrap_ci(a500, b500, CorrelationMethod::kSpearman, 1000, 42);
  const double ratio = (ci50.upper - ci50.lower) / (ci500.upper - ci500.lower);
  CHECK(ratio >= 2.0);
  CHECK(ratio <= 4.5);

  const auto again = bootstrap_ci(a50, b50, CorrelationMethod::kSpearman, 1000, 42);
  CHECK(again.lower == ci50.lower);
  CHECK(again.upper == ci50.upper);
  CHECK(ci50.lower < ci50.point);
  CHECK(ci50.point < ci50.upper);
}

TEST_CASE("BH examples and enumeration") {
  CHECK(bh_fdr(std::vector<double>{0.01, 0.02, 0.03}) == std::vector<double>{0.03, 0.03, 0.03});
  CHECK(bh_fdr(std::vector<double>{1, 1, 1}) == std::vector<double>{1, 1, 1});
  CHECK(bh_fdr(std::vector<double>{0.2}) == std::vector<double>{0.2});
  CHECK(error_of([] { bh_fdr(std::vector<double>{0.1, 1.5}); }) == ErrorCode::kInvalidP);
  CounterRng rng(9);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> p(1 + rng.next_below(10));
    for (double& v : p) v = rng.next_below(4) == 0 ? 0.05 : rng.next_unit();
    const auto got = bh_fdr(p), want = oracle::bh(p);
    for (std::size_t j = 0; j < p.size(); ++j) REQUIRE(std::abs(got[j] - want[j]) < 1e-12);
  }
}

TEST_CASE("Mann-Whitney examples") {
  const auto r = mann_whitney(std::vector<double>{1, 2}, std::vector<double>{3, 4});
  CHECK(r.u == 0.0);
  CHECK(r.u_b == 4.0);
  CHECK(r.exact);
  CHECK(r.p_value == doctest::Approx(2.0 / 6.0));
  const auto same = mann_whitney(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3});
  CHECK(same.p_value > 0.9);
  // a=(5), b=(1,2,3): three pairs with a > b
  const auto one = mann_whitney(std::vector<double>{5}, std::vector<double>{1, 2, 3});
  CHECK(one.u_a == 3.0);
  CHECK(one.u == 0.0);
  CHECK(one.direction == Dominance::kAGreater);
  CHECK(error_of([] { mann_whitney(std::vector<double>{}, std::vector<double>{1}); }) == ErrorCode::kEmptyGroup);
}

TEST_CASE("two-group statistics against enumeration") {
  CounterRng rng(4242);
  for (int i = 0; i < 200; ++i) {
    const std::size_t na = 1 + rng.next_below(5), nb = 1 + rng.next_below(5);
    const auto a = distinct(rng, na), b = distinct(rng, nb);
    const auto r = mann_whitney(a, b);
    REQUIRE(r.exact);
    REQUIRE(r.u_a == oracle::u_count(a, b));
    REQUIRE(r.u == std::min(oracle::u_count(a, b), oracle::u_count(b, a)));
    REQUIRE(std::abs(r.p_value - oracle::mann_whitney_exact_p(a, b)) < 1e-9);
    REQUIRE(std::abs(cliffs_delta(a, b) - oracle::cliffs_delta(a, b)) < 1e-12);
    // with ties
    const auto ta = draw(rng, na, 4), tb = draw(rng, nb, 4);
    REQUIRE(mann_whitney(ta, tb).u_a == oracle::u_count(ta, tb));
    REQUIRE(std::abs(cliffs_delta(ta, tb) - oracle::cliffs_delta(ta, tb)) < 1e-12);
  }
}

TEST_CASE("Cliff's delta examples") {
  CHECK(cliffs_delta(std::vector<double>{5, 6}, std::vector<double>{1, 2}) == 1.0);
  CHECK(cliffs_delta(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
  CHECK(cliffs_delta(std::vector<double>{1, 3}, std::vector<double>{2, 4}) == -0.5);
}

TEST_CASE("ROC") {
  const std::vector<double> sep = {0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
  const std::vector<std::uint8_t> lab = {0, 0, 0, 1, 1, 1};
  const auto r = roc(sep, lab, ScoreDirection::kHigherIsPositive);
  CHECK(r.auc == 1.0);
  CHECK(r.sensitivity == 1.0);
  CHECK(r.specificity == 1.0);
  CHECK(r.optimal_threshold == 0.7);
  const auto low = roc(sep, std::vector<std::uint8_t>{1, 1, 1, 0, 0, 0}, ScoreDirection::kLowerIsPositive);
  CHECK(low.auc == 1.0);
  CHECK(low.optimal_threshold == 0.3);

  // symmetric construction: each positive score mirrored by a negative one
  const std::vector<double> sym = {1, 2, 3, 4, 1, 2, 3, 4};
  const std::vector<std::uint8_t> sl = {1, 0, 1, 0, 0, 1, 0, 1};
  CHECK(roc(sym, sl, ScoreDirection::kHigherIsPositive).auc == 0.5);

  // 6-point hand case: AUC = U / (n1 n0)
  const std::vector<double> s6 = {0.3, 0.9, 0.5, 0.1, 0.7, 0.4};
  const std::vector<std::uint8_t> l6 = {1, 1, 0, 0, 1, 0};
  const std::vector<double> pos = {0.3, 0.9, 0.7}, neg = {0.5, 0.1, 0.4};
  CHECK(roc(s6, l6, ScoreDirection::kHigherIsPositive).auc == oracle::u_count(pos, neg) / 9.0);

  CHECK(error_of([&] { roc(sep, std::vector<std::uint8_t>(6, 1), ScoreDirection::kHigherIsPositive); }) ==
        ErrorCode::kSingleClass);

  CounterRng rng(61);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng.next_below(9);
    auto s = draw(rng, n, 5);
    std::vector<std::uint8_t> l(n);
    for (auto& v : l) v = static_cast<std::uint8_t>(rng.next_below(2));
    l[0] = 1;
    l[1] = 0;
    REQUIRE(std::abs(roc(s, l, ScoreDirection::kHigherIsPositive).auc - oracle::auc(s, l)) < 1e-12);
  }
}

TEST_CASE("DerSimonian-Laird three-study example") {
  const std::vector<Effect> e = {{-0.9, 58}, {-0.5, 100}, {-0.3, 220}};
  const auto m = dl_meta(e);
  const auto o = oracle::dersimonian_laird({-0.9, -0.5, -0.3}, {58, 100, 220});
  CHECK(std::abs(m.tau2 - o.tau2) < 1e-6);
  CHECK(std::abs(m.pooled_rho - o.pooled_rho) < 1e-6);
  CHECK(std::abs(m.i2 - o.i2) < 1e-6);
  CHECK(std::abs(m.hksj_ci.lower - o.hksj_lower) < 1e-6);
  CHECK(std::abs(m.hksj_ci.upper - o.hksj_upper) < 1e-6);
  CHECK(std::abs(m.dl_ci.lower - o.dl_lower) < 1e-6);
  REQUIRE(m.prediction_interval);
  CHECK(std::abs(m.prediction_interval->lower - o.pi_lower) < 1e-6);
  // HKSJ wider than DL, prediction interval wider than HKSJ
  CHECK(m.hksj_ci.upper - m.hksj_ci.lower > m.dl_ci.upper - m.dl_ci.lower);
  CHECK(m.prediction_interval->upper - m.prediction_interval->lower > m.hksj_ci.upper - m.hksj_ci.lower);
  CHECK(m.i2 > 0.8);
}

TEST_CASE("meta-analysis edge cases") {
  const std::vector<Effect> same = {{-0.4, 50}, {-0.4, 50}, {-0.4, 50}, {-0.4, 50}};
  const auto m = dl_meta(same);
  CHECK(m.tau2 == 0.0);
  CHECK(m.i2 == 0.0);
  CHECK(m.pooled_rho == doctest::Approx(-0.4));
  CHECK(std::abs(m.hksj_ci.upper - m.hksj_ci.lower) < 1e-12);

  CHECK(error_of([] { dl_meta(std::vector<Effect>{{0.3, 40}}); }) == ErrorCode::kTooFewStudies);
  CHECK(error_of([] { dl_meta(std::vector<Effect>{{1.0, 40}, {0.3, 40}}); }) == ErrorCode::kDegenerateRho);

  // k = 2: HKSJ uses the t(1) quantile
  const std::vector<Effect> two = {{-0.8, 40}, {-0.2, 60}};
  const auto m2 = dl_meta(two);
  const auto o2 = oracle::dersimonian_laird({-0.8, -0.2}, {40, 60});
  CHECK(std::abs(m2.hksj_ci.lower - o2.hksj_lower) < 1e-6);
  CHECK(std::abs(m2.hksj_ci.upper - o2.hksj_upper) < 1e-6);
  CHECK(!m2.prediction_interval);
  CHECK(error_of([&] { prediction_interval(m2, two); }) == ErrorCode::kTooFewStudies);
}

TEST_CASE("logistic regression leave-one-out") {
  CounterRng rng(21);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  const double centres[3][2] = {{0, 0}, {6, 0}, {0, 6}};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 20; ++i) {
      rows.push_back({centres[c][0] + rng.next_gaussian() * 0.5, centres[c][1] + rng.next_gaussian() * 0.5,
                      rng.next_gaussian()});
      labels.push_back(c);
    }
  }
  const auto sep = logistic_loso(rows, labels);
  CHECK(sep.accuracy >= 0.95);
  CHECK(sep.coefficients[2] < sep.coefficients[0]);
  CHECK(sep.class_counts == std::vector<std::size_t>{20, 20, 20});

  // missing values are imputed, not fatal
  auto holes = rows;
  holes[3][0] = NAN;
  holes[40][1] = NAN;
  CHECK(logistic_loso(holes, labels).accuracy >= 0.9);

  std::vector<int> shuffled = labels;
  rng.partial_shuffle(shuffled, shuffled.size());
  std::vector<std::vector<double>> noise;
  for (std::size_t i = 0; i < rows.size(); ++i) noise.push_back({rng.next_gaussian(), rng.next_gaussian()});
  const auto chance = logistic_loso(noise, shuffled);
  CHECK(std::abs(chance.accuracy - 1.0 / 3.0) <= 0.15);

  std::vector<int> tiny = labels;
  tiny[0] = 3;
  CHECK(error_of([&] { logistic_loso(rows, tiny); }) == ErrorCode::kClassTooSmall);
}
