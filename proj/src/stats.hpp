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

// Statistical kernel: rank correlations, resampling, multiplicity control,
// two-group tests, random-effects pooling, ROC and multinomial logistic
// regression.  Everything here is a pure function over its arguments and
// computes in double precision.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phonoprof::stats {

// ---- special functions -----------------------------------------------------

double normal_cdf(double x);
double normal_quantile(double p);
double log_beta(double a, double b);
// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);
double student_t_cdf(double t, double df);
// P(|T| >= |t|) for T ~ t(df).
double student_t_two_sided_p(double t, double df);
double student_t_quantile(double p, double df);

// ---- ranks and correlations -------------------------------------------------

// 1-based ranks, ties get the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);

enum class CorrelationMethod { kSpearman, kKendall, kPartialSpearman };

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  CorrelationMethod method = CorrelationMethod::kSpearman;
};

CorrelationResult spearman(std::span<const double> x, std::span<const double> y);
// Tau-b with normal-approximation p (tie-corrected variance of S).
CorrelationResult kendall_tau(std::span<const double> x, std::span<const double> y);
// Spearman correlation of x and y controlling for z.
CorrelationResult partial_spearman(std::span<const double> x, std::span<const double> y,
                                   std::span<const double> z);

struct BootstrapCI {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  // Iterations abandoned after 100 constant redraws.
  std::size_t skipped = 0;
};

// Percentile interval (2.5 / 97.5, linear interpolation) over resampled
// pairs.  Iteration i draws from the stream derive_key(seed, i).
BootstrapCI bootstrap_ci(std::span<const double> x, std::span<const double> y,
                         CorrelationMethod statistic = CorrelationMethod::kSpearman,
                         std::size_t iterations = 1000, std::uint64_t seed = 42);

// Linear-interpolation quantile of an ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double q);

// ---- multiplicity -----------------------------------------------------------

std::vector<double> bh_fdr(std::span<const double> p_values);

// ---- two-group comparisons ----------------------------------------------------

enum class Dominance { kAGreater, kBGreater, kEqual };

struct MannWhitneyResult {
  double u = 0.0;    // min(u_a, u_b)
  double u_a = 0.0;  // pairs with a > b, ties counted half
  double u_b = 0.0;
  double p_value = 1.0;
  bool exact = false;
  Dominance direction = Dominance::kEqual;
};

// Exact enumeration p when |a| + |b| <= 12 and there are no ties; otherwise
// the normal approximation with tie and continuity correction.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);
double cliffs_delta(std::span<const double> a, std::span<const double> b);

// ---- random-effects meta-analysis --------------------------------------------

struct Effect {
  double rho = 0.0;
  std::size_t n = 0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct MetaAnalysisResult {
  std::size_t k = 0;
  double pooled_z = 0.0;
  double pooled_rho = 0.0;
  double se = 0.0;  // DL standard error of pooled_z
  double tau2 = 0.0;
  double i2 = 0.0;
  double q_stat = 0.0;
  Interval dl_ci;
  double dl_p = 1.0;
  Interval hksj_ci;
  double hksj_p = 1.0;
  std::optional<Interval> prediction_interval;  // needs k >= 3
};

// DerSimonian-Laird on Fisher z with v_i = 1/(n_i - 3).  Fills the HKSJ and
// prediction-interval fields as well.
MetaAnalysisResult dl_meta(std::span<const Effect> effects);
std::pair<Interval, double> hksj_adjust(const MetaAnalysisResult& meta, std::span<const Effect> effects);
Interval prediction_interval(const MetaAnalysisResult& meta, std::span<const Effect> effects);

// ---- ROC ------------------------------------------------------------------------

enum class ScoreDirection { kHigherIsPositive, kLowerIsPositive };

struct RocResult {
  double auc = 0.5;
  double optimal_threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double youden_j = 0.0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};

// Positive calls are score >= threshold (higher-is-positive) or
// score <= threshold (lower-is-positive).  Youden ties go to the higher
// specificity.
RocResult roc(std::span<const double> scores, std::span<const std::uint8_t> labels, ScoreDirection direction);

// ---- multinomial logistic regression ---------------------------------------

struct LogisticOptions {
  double l2 = 1.0;
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

struct LogisticLosoResult {
  double accuracy = 0.0;
  std::vector<double> per_class_recall;
  std::vector<std::size_t> class_counts;
  // Mean |weight| across classes per feature, from the full-data fit on
  // standardized features.
  std::vector<double> coefficients;
  std::vector<int> predictions;
};

// rows[i] holds the features of sample i; NaN marks a missing value, imputed
// by the training-fold median.  Labels are 0..K-1.
LogisticLosoResult logistic_loso(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                                 const LogisticOptions& options = {});

}  // namespace phonoprof::stats
