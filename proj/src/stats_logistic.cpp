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

// Multinomial logistic regression (softmax, L2 on non-intercept weights)
// fitted by damped Newton iterations, plus leave-one-out evaluation.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "error.hpp"
#include "stats.hpp"

namespace phonoprof::stats {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Scaler {
  std::vector<double> median, mean, sd;
};

// Training-fold imputation and z-scoring.
Scaler fit_scaler(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& train, std::size_t p) {
  Scaler s;
  s.median.assign(p, 0.0);
  s.mean.assign(p, 0.0);
  s.sd.assign(p, 1.0);
  std::vector<double> col;
  for (std::size_t j = 0; j < p; ++j) {
    col.clear();
    for (std::size_t i : train) {
      if (!std::isnan(rows[i][j])) col.push_back(rows[i][j]);
    }
    if (col.empty()) continue;
    std::sort(col.begin(), col.end());
    const std::size_t m = col.size();
    s.median[j] = m % 2 ? col[m / 2] : 0.5 * (col[m / 2 - 1] + col[m / 2]);
    double sum = 0, sq = 0;
    for (std::size_t i : train) sum += std::isnan(rows[i][j]) ? s.median[j] : rows[i][j];
    s.mean[j] = sum / static_cast<double>(train.size());
    for (std::size_t i : train) {
      const double v = (std::isnan(rows[i][j]) ? s.median[j] : rows[i][j]) - s.mean[j];
      sq += v * v;
    }
    const double sd = std::sqrt(sq / static_cast<double>(train.size()));
    s.sd[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

VectorXd transform(const Scaler& s, const std::vector<double>& row) {
  const std::size_t p = row.size();
  VectorXd x(p + 1);
  x(0) = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double v = std::isnan(row[j]) ? s.median[j] : row[j];
    x(static_cast<Eigen::Index>(j + 1)) = (v - s.mean[j]) / s.sd[j];
  }
  return x;
}

class SoftmaxModel {
 public:
  SoftmaxModel(std::size_t classes, std::size_t features) : k_(classes), d_(features + 1), theta_(VectorXd::Zero(static_cast<Eigen::Index>(classes * (features + 1)))) {}

  VectorXd probabilities(const VectorXd& x) const {
    VectorXd eta(static_cast<Eigen::Index>(k_));
    for (std::size_t c = 0; c < k_; ++c) eta(static_cast<Eigen::Index>(c)) = theta_.segment(block(c), dim()).dot(x);
    const double mx = eta.maxCoeff();
    VectorXd e = (eta.array() - mx).exp();
    return e / e.sum();
  }

  int predict(const VectorXd& x) const {
    Eigen::Index best = 0;
    probabilities(x).maxCoeff(&best);
    return static_cast<int>(best);
  }

  double loss(const std::vector<VectorXd>& xs, const std::vector<int>& ys, double l2, const VectorXd& theta) const {
    double total = 0.0;
    VectorXd eta(static_cast<Eigen::Index>(k_));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t c = 0; c < k_; ++c) eta(static_cast<Eigen::Index>(c)) = theta.segment(block(c), dim()).dot(xs[i]);
      const double mx = eta.maxCoeff();
      const double lse = mx + std::log((eta.array() - mx).exp().sum());
      total += lse - eta(ys[i]);
    }
    for (std::size_t c = 0; c < k_; ++c) total += 0.5 * l2 * theta.segment(block(c) + 1, dim() - 1).squaredNorm();
    return total;
  }

  void fit(const std::vector<VectorXd>& xs, const std::vector<int>& ys, const LogisticOptions& opt) {
    const auto n_par = static_cast<Eigen::Index>(k_ * d_);
    double current = loss(xs, ys, opt.l2, theta_);
    for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
      VectorXd grad = VectorXd::Zero(n_par);
      MatrixXd hess = MatrixXd::Zero(n_par, n_par);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const VectorXd pr = probabilities(xs[i]);
        const MatrixXd xx = xs[i] * xs[i].transpose();
        for (std::size_t a = 0; a < k_; ++a) {
          const double resid = pr(static_cast<Eigen::Index>(a)) - (ys[i] == static_cast<int>(a) ? 1.0 : 0.0);
          grad.segment(block(a), dim()) += resid * xs[i];
          for (std::size_t b = a; b < k_; ++b) {
            const double w = (a == b ? pr(static_cast<Eigen::Index>(a)) : 0.0) -
                             pr(static_cast<Eigen::Index>(a)) * pr(static_cast<Eigen::Index>(b));
            hess.block(block(a), block(b), dim(), dim()) += w * xx;
          }
        }
      }
      for (std::size_t a = 0; a < k_; ++a) {
        for (std::size_t b = a + 1; b < k_; ++b) {
          hess.block(block(b), block(a), dim(), dim()) = hess.block(block(a), block(b), dim(), dim()).transpose();
        }
        grad.segment(block(a) + 1, dim() - 1) += opt.l2 * theta_.segment(block(a) + 1, dim() - 1);
        for (Eigen::Index j = 0; j < dim(); ++j) {
          // intercepts share one null direction; a tiny ridge keeps the system solvable
          hess(block(a) + j, block(a) + j) += j == 0 ? 1e-8 : opt.l2;
        }
      }
      const VectorXd step = hess.ldlt().solve(grad);
      double scale = 1.0;
      double next = current;
      VectorXd candidate;
      for (int ls = 0; ls < 60; ++ls) {
        candidate = theta_ - scale * step;
        next = loss(xs, ys, opt.l2, candidate);
        if (next <= current) break;
        scale *= 0.5;
      }
      if (!(next <= current)) return;  // no descent left at machine precision
      theta_ = candidate;
      const double change = current - next;
      current = next;
      if (change < opt.tolerance) return;
    }
    fail(ErrorCode::kNonConvergence, "logistic regression did not converge");
  }

  void warm_start(const SoftmaxModel& other) { theta_ = other.theta_; }

  double weight(std::size_t c, std::size_t feature) const {
    return theta_(block(c) + static_cast<Eigen::Index>(feature + 1));
  }

 private:
  Eigen::Index block(std::size_t c) const { return static_cast<Eigen::Index>(c * d_); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(d_); }

  std::size_t k_;
  std::size_t d_;
  VectorXd theta_;
};

}  // namespace

LogisticLosoResult logistic_loso(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                                 const LogisticOptions& options) {
  const std::size_t n = rows.size();
  if (labels.size() != n) fail(ErrorCode::kInvalidArgument, "rows and labels differ in length");
  if (n == 0) fail(ErrorCode::kClassTooSmall, "no samples");
  const std::size_t p = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != p) fail(ErrorCode::kInvalidArgument, "rows differ in feature count");
    for (double v : r) if (std::isinf(v)) fail(ErrorCode::kInvalidArgument, "feature value is infinite");
  }
  int max_label = -1;
  for (int y : labels) {
    if (y < 0) fail(ErrorCode::kInvalidArgument, "labels must be non-negative");
    max_label = std::max(max_label, y);
  }
  const auto k = static_cast<std::size_t>(max_label + 1);
  if (k < 2) fail(ErrorCode::kClassTooSmall, "need at least two classes");
  std::vector<std::size_t> counts(k, 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] < 2) fail(ErrorCode::kClassTooSmall, "class " + std::to_string(c) + " has fewer than 2 samples");
  }

  LogisticLosoResult result;
  result.class_counts = counts;

  // full-data fit: coefficients and warm start for the folds
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const Scaler full_scaler = fit_scaler(rows, all, p);
  std::vector<VectorXd> xs(n);
  std::vector<int> ys(labels.begin(), labels.end());
  for (std::size_t i = 0; i < n; ++i) xs[i] = transform(full_scaler, rows[i]);
  SoftmaxModel full(k, p);
  full.fit(xs, ys, options);
  result.coefficients.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0;
    for (std::size_t c = 0; c < k; ++c) s += std::abs(full.weight(c, j));
    result.coefficients[j] = s / static_cast<double>(k);
  }

  result.predictions.assign(n, -1);
  std::vector<std::size_t> correct(k, 0);
  std::size_t hits = 0;
  std::vector<std::size_t> train;
  std::vector<VectorXd> fold_x;
  std::vector<int> fold_y;
  for (std::size_t held = 0; held < n; ++held) {
    train.clear();
    for (std::size_t i = 0; i < n; ++i) if (i != held) train.push_back(i);
    const Scaler s = fit_scaler(rows, train, p);
    fold_x.clear();
    fold_y.clear();
    for (std::size_t i : train) {
      fold_x.push_back(transform(s, rows[i]));
      fold_y.push_back(labels[i]);
    }
    SoftmaxModel model(k, p);
    model.warm_start(full);
    model.fit(fold_x, fold_y, options);
    const int pred = model.predict(transform(s, rows[held]));
    result.predictions[held] = pred;
    if (pred == labels[held]) {
      ++hits;
      ++correct[static_cast<std::size_t>(labels[held])];
    }
  }
  result.accuracy = static_cast<double>(hits) / static_cast<double>(n);
  result.per_class_recall.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    result.per_class_recall[c] = static_cast<double>(correct[c]) / static_cast<double>(counts[c]);
  }
  return result;
}

}  // namespace phonoprof::stats
