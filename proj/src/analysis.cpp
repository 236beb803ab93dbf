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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"

namespace phonoprof {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Getter = std::function<std::optional<double>(const SpeakerProfile&)>;

Getter metric_getter(std::size_t m) {
  return [m](const SpeakerProfile& p) { return p.metrics[m].value; };
}

std::optional<double> severity_of(const SpeakerProfile& p) {
  if (!p.severity) return std::nullopt;
  return static_cast<double>(*p.severity);
}

struct Paired {
  std::vector<double> x, y, z;
};

// Pairwise-complete values over `set`.
Paired collect(const std::vector<const SpeakerProfile*>& set, const Getter& fx, const Getter& fy,
               const Getter& fz = nullptr) {
  Paired out;
  for (const SpeakerProfile* p : set) {
    const auto x = fx(*p);
    const auto y = fy(*p);
    if (!x || !y) continue;
    std::optional<double> z;
    if (fz) {
      z = fz(*p);
      if (!z) continue;
      out.z.push_back(*z);
    }
    out.x.push_back(*x);
    out.y.push_back(*y);
  }
  return out;
}

std::string ok() { return "ok"; }
std::string status(const Error& e) { return error_code_name(e.code()); }

Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

std::vector<std::size_t> consonant_metrics() {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < kConsonantFeatureCount; ++k) out.push_back(k);
  return out;
}

std::vector<std::size_t> dprime_metrics() {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < kFeatureCount; ++k) out.push_back(k);
  return out;
}

std::vector<std::string> corpora_of(const std::vector<const SpeakerProfile*>& set) {
  std::set<std::string> names;
  for (const auto* p : set) names.insert(p->corpus);
  return {names.begin(), names.end()};
}

std::vector<const SpeakerProfile*> filter(const std::vector<const SpeakerProfile*>& set,
                                          const std::function<bool(const SpeakerProfile&)>& keep) {
  std::vector<const SpeakerProfile*> out;
  for (const auto* p : set) {
    if (keep(*p)) out.push_back(p);
  }
  return out;
}

std::size_t severity_levels(const std::vector<const SpeakerProfile*>& set) {
  std::set<int> levels;
  for (const auto* p : set) levels.insert(*p->severity);
  return levels.size();
}

}  // namespace

// ---- Table --------------------------------------------------------------------

std::size_t Table::column(std::string_view col) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == col) return i;
  }
  fail(ErrorCode::kInvalidArgument, "table " + name + " has no column " + std::string(col));
}

const Cell& Table::at(std::size_t row, std::string_view col) const { return rows.at(row).at(column(col)); }

double Table::number(std::size_t row, std::string_view col) const {
  const Cell& c = at(row, col);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return kNaN;
}

std::string Table::text(std::size_t row, std::string_view col) const {
  const Cell& c = at(row, col);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return csv::number(*d, 12);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return "";
}

std::size_t Table::find(std::initializer_list<std::pair<std::string_view, std::string_view>> keys) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bool match = true;
    for (const auto& [col, value] : keys) {
      if (text(r, col) != value) {
        match = false;
        break;
      }
    }
    if (match) return r;
  }
  fail(ErrorCode::kInvalidArgument, "no matching row in table " + name);
}

const Table& AnalysisReport::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  fail(ErrorCode::kInvalidArgument, "report has no table " + std::string(name));
}

std::vector<const SpeakerProfile*> analysis_set(const std::vector<SpeakerProfile>& profiles) {
  std::vector<const SpeakerProfile*> out;
  for (const auto& p : profiles) {
    if (!p.excluded && p.severity) out.push_back(&p);
  }
  // manifest order must not matter
  std::sort(out.begin(), out.end(), [](const SpeakerProfile* a, const SpeakerProfile* b) {
    return std::tie(a->corpus, a->speaker_id) < std::tie(b->corpus, b->speaker_id);
  });
  return out;
}

std::optional<double> mean_consonant_dprime(const SpeakerProfile& p) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < kConsonantFeatureCount; ++k) {
    if (p.metrics[k].value) {
      sum += *p.metrics[k].value;
      ++n;
    }
  }
  if (n < 3) return std::nullopt;
  return sum / static_cast<double>(n);
}

// ---- severity correlations ---------------------------------------------------

CorrelationTables severity_correlation_report(const std::vector<SpeakerProfile>& profiles,
                                              const AnalysisOptions& options) {
  const auto set = analysis_set(profiles);
  CorrelationTables out;
  out.pooled.name = "correlations";
  out.pooled.columns = {"feature", "n", "rho", "p", "p_fdr", "ci_lower", "ci_upper", "bootstrap_iterations",
                        "bootstrap_skipped", "kendall_tau", "kendall_p", "status"};
  out.within_corpus.name = "within_corpus";
  out.within_corpus.columns = {"corpus", "feature", "n", "levels", "rho", "p", "p_fdr", "status"};
  out.fdr.name = "fdr";
  out.fdr.columns = {"family", "corpus", "feature", "p", "p_fdr"};

  struct Test {
    Table* table;
    std::size_t row;
    std::string family, corpus, feature;
    double p;
  };
  std::vector<Test> tests;

  for (std::size_t m = 0; m < kMetricCount; ++m) {
    const std::string& name = metric_names()[m];
    const Paired d = collect(set, metric_getter(m), severity_of);
    std::vector<Cell> row = {name, count(d.x.size()), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    try {
      const auto rho = stats::spearman(d.x, d.y);
      row[2] = rho.coefficient;
      row[3] = rho.p_value;
      const auto ci = stats::bootstrap_ci(d.x, d.y, stats::CorrelationMethod::kSpearman,
                                          options.bootstrap_iterations, options.seed);
      row[5] = ci.lower;
      row[6] = ci.upper;
      row[7] = count(ci.iterations);
      row[8] = count(ci.skipped);
      const auto tau = stats::kendall_tau(d.x, d.y);
      row[9] = tau.coefficient;
      row[10] = tau.p_value;
      row[11] = ok();
      tests.push_back({&out.pooled, out.pooled.rows.size(), "pooled", "", name, rho.p_value});
    } catch (const Error& e) {
      row[11] = status(e);
    }
    out.pooled.rows.push_back(std::move(row));
  }

  for (const auto& corpus : corpora_of(set)) {
    const auto members = filter(set, [&](const SpeakerProfile& p) { return p.corpus == corpus; });
    const std::size_t levels = severity_levels(members);
    if (levels < 3) continue;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      const std::string& name = metric_names()[m];
      const Paired d = collect(members, metric_getter(m), severity_of);
      std::vector<Cell> row = {corpus, name, count(d.x.size()), count(levels), {}, {}, {}, {}};
      try {
        const auto rho = stats::spearman(d.x, d.y);
        row[4] = rho.coefficient;
        row[5] = rho.p_value;
        row[7] = ok();
        tests.push_back({&out.within_corpus, out.within_corpus.rows.size(), "within_corpus", corpus, name,
                         rho.p_value});
      } catch (const Error& e) {
        row[7] = status(e);
      }
      out.within_corpus.rows.push_back(std::move(row));
    }
  }

  std::vector<double> ps;
  for (const auto& t : tests) ps.push_back(t.p);
  const auto adjusted = stats::bh_fdr(ps);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    Table& t = *tests[i].table;
    t.rows[tests[i].row][t.column("p_fdr")] = adjusted[i];
    out.fdr.rows.push_back({tests[i].family, tests[i].corpus, tests[i].feature, tests[i].p, adjusted[i]});
  }
  return out;
}

// ---- leave-one-corpus-out ------------------------------------------------------

Table loco_sensitivity(const std::vector<SpeakerProfile>& profiles) {
  const auto set = analysis_set(profiles);
  Table t;
  t.name = "loco";
  t.columns = {"feature", "scope", "removed_corpus", "n", "rho", "p", "delta_rho", "status"};
  const auto corpora = corpora_of(set);
  for (std::size_t m : consonant_metrics()) {
    const std::string& name = metric_names()[m];
    double baseline = kNaN;
    auto emit = [&](const std::string& scope, const std::string& removed,
                    const std::vector<const SpeakerProfile*>& members) {
      const Paired d = collect(members, metric_getter(m), severity_of);
      std::vector<Cell> row = {name, scope, removed, count(d.x.size()), {}, {}, {}, {}};
      try {
        const auto rho = stats::spearman(d.x, d.y);
        row[4] = rho.coefficient;
        row[5] = rho.p_value;
        if (scope == "baseline") baseline = rho.coefficient;
        row[6] = rho.coefficient - baseline;
        row[7] = ok();
      } catch (const Error& e) {
        row[7] = status(e);
      }
      t.rows.push_back(std::move(row));
    };
    emit("baseline", "", set);
    for (const auto& corpus : corpora) {
      emit("leave_out", corpus, filter(set, [&](const SpeakerProfile& p) { return p.corpus != corpus; }));
    }
  }
  return t;
}

// ---- token-count quartiles -----------------------------------------------------

Table quartile_stratification(const std::vector<SpeakerProfile>& profiles, std::span<const std::size_t> metrics) {
  const auto set = analysis_set(profiles);
  if (set.size() < 8) {
    fail(ErrorCode::kStratumTooSmall,
         "quartile stratification needs at least 8 speakers, have " + std::to_string(set.size()));
  }
  std::vector<std::size_t> chosen(metrics.begin(), metrics.end());
  if (chosen.empty()) chosen = consonant_metrics();

  std::vector<double> cov;
  for (const auto* p : set) cov.push_back(static_cast<double>(p->n_phones));
  std::sort(cov.begin(), cov.end());
  const std::array<double, 3> cut = {stats::sorted_quantile(cov, 0.25), stats::sorted_quantile(cov, 0.5),
                                     stats::sorted_quantile(cov, 0.75)};
  auto quartile_of = [&](const SpeakerProfile& p) {
    const double v = static_cast<double>(p.n_phones);
    std::size_t q = 0;
    while (q < 3 && v > cut[q]) ++q;
    return q;
  };

  Table t;
  t.name = "quartiles";
  t.columns = {"covariate", "quartile", "covariate_min", "covariate_max", "feature", "n", "rho", "p", "status"};
  for (std::size_t q = 0; q < 4; ++q) {
    const auto members = filter(set, [&](const SpeakerProfile& p) { return quartile_of(p) == q; });
    double lo = kNaN, hi = kNaN;
    for (const auto* p : members) {
      const double v = static_cast<double>(p->n_phones);
      lo = std::isnan(lo) ? v : std::min(lo, v);
      hi = std::isnan(hi) ? v : std::max(hi, v);
    }
    for (std::size_t m : chosen) {
      const Paired d = collect(members, metric_getter(m), severity_of);
      std::vector<Cell> row = {std::string("n_phones"), count(q + 1), lo, hi, metric_names()[m],
                               count(d.x.size()), {}, {}, {}};
      try {
        const auto rho = stats::spearman(d.x, d.y);
        row[6] = rho.coefficient;
        row[7] = rho.p_value;
        row[8] = ok();
      } catch (const Error& e) {
        row[8] = status(e);
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

// ---- alignment quality -----------------------------------------------------------

Table alignment_controls(const std::vector<SpeakerProfile>& profiles) {
  const auto set = analysis_set(profiles);
  Table t;
  t.name = "alignment";
  t.columns = {"feature", "variant", "n", "rho", "p", "status"};
  auto emit = [&](const std::string& feature, const std::string& variant, const Paired& d, bool partial) {
    std::vector<Cell> row = {feature, variant, count(d.x.size()), {}, {}, {}};
    try {
      const auto r = partial ? stats::partial_spearman(d.x, d.y, d.z) : stats::spearman(d.x, d.y);
      row[3] = r.coefficient;
      row[4] = r.p_value;
      row[5] = ok();
    } catch (const Error& e) {
      row[5] = status(e);
    }
    t.rows.push_back(std::move(row));
  };
  const Getter ppu = [](const SpeakerProfile& p) { return std::optional<double>(p.phones_per_utterance); };
  const Getter n_phones = [](const SpeakerProfile& p) { return std::optional<double>(static_cast<double>(p.n_phones)); };
  emit("phones_per_utterance", "severity_vs_covariate", collect(set, ppu, severity_of), false);

  // bottom decile by alignment quality: keep the ceil(0.9 n) best-aligned speakers
  std::vector<const SpeakerProfile*> by_quality = set;
  std::stable_sort(by_quality.begin(), by_quality.end(), [](const SpeakerProfile* a, const SpeakerProfile* b) {
    return a->phones_per_utterance < b->phones_per_utterance;
  });
  const auto keep = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(set.size())));
  const std::vector<const SpeakerProfile*> kept(by_quality.end() - static_cast<std::ptrdiff_t>(keep), by_quality.end());
  t.rows.push_back({std::string("all"), std::string("bottom_decile_kept"), count(kept.size()), {}, {}, ok()});

  for (std::size_t m : dprime_metrics()) {
    const std::string& name = metric_names()[m];
    emit(name, "raw", collect(set, metric_getter(m), severity_of), false);
    emit(name, "partial_phones_per_utterance", collect(set, metric_getter(m), severity_of, ppu), true);
    emit(name, "partial_n_phones", collect(set, metric_getter(m), severity_of, n_phones), true);
    emit(name, "bottom_decile_excluded", collect(kept, metric_getter(m), severity_of), false);
    emit(name, "min_duration_30ms",
         collect(set, [m](const SpeakerProfile& p) { return p.filtered30[m].value; }, severity_of), false);
    emit(name, "subsampled",
         collect(set, [m](const SpeakerProfile& p) { return p.subsampled[m].value; }, severity_of), false);
  }
  return t;
}

// ---- screening ----------------------------------------------------------------------

Table screening_report(const std::vector<SpeakerProfile>& profiles) {
  const auto set = analysis_set(profiles);
  Table t;
  t.name = "roc";
  t.columns = {"task", "feature", "n_positive", "n_negative", "auc", "threshold", "sensitivity", "specificity",
               "youden_j", "status"};
  struct Task {
    const char* name;
    int min_positive;
  };
  const std::array<Task, 2> tasks = {{{"severe_vs_rest", 3}, {"modsev_vs_rest", 2}}};
  std::vector<std::pair<std::string, Getter>> features;
  for (std::size_t m : consonant_metrics()) features.emplace_back(metric_names()[m], metric_getter(m));
  features.emplace_back("mean_consonant", mean_consonant_dprime);

  for (const Task& task : tasks) {
    for (const auto& [name, get] : features) {
      std::vector<double> scores;
      std::vector<std::uint8_t> labels;
      std::size_t npos = 0;
      for (const auto* p : set) {
        const auto v = get(*p);
        if (!v) continue;
        scores.push_back(*v);
        labels.push_back(*p->severity >= task.min_positive ? 1 : 0);
        npos += labels.back();
      }
      std::vector<Cell> row = {std::string(task.name), name, count(npos), count(scores.size() - npos),
                               {}, {}, {}, {}, {}, {}};
      try {
        const auto r = stats::roc(scores, labels, stats::ScoreDirection::kLowerIsPositive);
        row[4] = r.auc;
        row[5] = r.optimal_threshold;
        row[6] = r.sensitivity;
        row[7] = r.specificity;
        row[8] = r.youden_j;
        row[9] = ok();
      } catch (const Error& e) {
        row[9] = status(e);
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

// ---- meta-analysis across corpora -------------------------------------------------

Table meta_report(const std::vector<SpeakerProfile>& profiles) {
  const auto set = analysis_set(profiles);
  Table t;
  t.name = "meta";
  t.columns = {"feature",  "row",      "corpus",     "k",          "n",      "rho",      "tau2",     "i2",
               "q",        "dl_lower", "dl_upper",   "dl_p",       "hksj_lower", "hksj_upper", "hksj_p",
               "pi_lower", "pi_upper", "status"};
  const auto corpora = corpora_of(set);
  for (std::size_t m : consonant_metrics()) {
    const std::string& name = metric_names()[m];
    std::vector<stats::Effect> effects;
    std::size_t n_total = 0;
    for (const auto& corpus : corpora) {
      const auto members = filter(set, [&](const SpeakerProfile& p) { return p.corpus == corpus && p.metrics[m].value; });
      const Paired d = collect(members, metric_getter(m), severity_of);
      std::vector<Cell> row(t.columns.size());
      row[0] = name;
      row[1] = std::string("study");
      row[2] = corpus;
      row[4] = count(d.x.size());
      if (d.x.size() < 4 || severity_levels(members) < 2) {
        row[17] = std::string("Ineligible");
        t.rows.push_back(std::move(row));
        continue;
      }
      try {
        const auto rho = stats::spearman(d.x, d.y);
        row[5] = rho.coefficient;
        if (std::abs(rho.coefficient) >= 1.0) fail(ErrorCode::kDegenerateRho, "perfect within-corpus correlation");
        effects.push_back({rho.coefficient, d.x.size()});
        n_total += d.x.size();
        row[17] = ok();
      } catch (const Error& e) {
        row[17] = status(e);
      }
      t.rows.push_back(std::move(row));
    }
    std::vector<Cell> row(t.columns.size());
    row[0] = name;
    row[1] = std::string("pooled");
    row[2] = std::string("");
    row[3] = count(effects.size());
    row[4] = count(n_total);
    try {
      const auto meta = stats::dl_meta(effects);
      row[5] = meta.pooled_rho;
      row[6] = meta.tau2;
      row[7] = meta.i2;
      row[8] = meta.q_stat;
      row[9] = meta.dl_ci.lower;
      row[10] = meta.dl_ci.upper;
      row[11] = meta.dl_p;
      row[12] = meta.hksj_ci.lower;
      row[13] = meta.hksj_ci.upper;
      row[14] = meta.hksj_p;
      if (meta.prediction_interval) {
        row[15] = meta.prediction_interval->lower;
        row[16] = meta.prediction_interval->upper;
      }
      row[17] = ok();
    } catch (const Error& e) {
      row[17] = status(e);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---- control vs severe -------------------------------------------------------------

Table group_report(const std::vector<SpeakerProfile>& profiles) {
  const auto set = analysis_set(profiles);
  Table t;
  t.name = "groups";
  t.columns = {"feature", "n_control", "n_severe", "u", "u_control", "u_severe", "p", "exact", "direction",
               "cliffs_delta", "status"};
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    std::vector<double> control, severe;
    for (const auto* p : set) {
      const auto v = p->metrics[m].value;
      if (!v) continue;
      if (*p->severity == 0) control.push_back(*v);
      if (*p->severity == 3) severe.push_back(*v);
    }
    std::vector<Cell> row = {metric_names()[m], count(control.size()), count(severe.size()), {}, {}, {}, {}, {}, {},
                             {}, {}};
    try {
      const auto mw = stats::mann_whitney(control, severe);
      row[3] = mw.u;
      row[4] = mw.u_a;
      row[5] = mw.u_b;
      row[6] = mw.p_value;
      row[7] = count(mw.exact ? 1 : 0);
      row[8] = std::string(mw.direction == stats::Dominance::kAGreater   ? "control_greater"
                           : mw.direction == stats::Dominance::kBGreater ? "severe_greater"
                                                                         : "equal");
      row[9] = stats::cliffs_delta(control, severe);
      row[10] = ok();
    } catch (const Error& e) {
      row[10] = status(e);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---- aetiology discrimination ------------------------------------------------------

Table aetiology_report(const std::vector<SpeakerProfile>& profiles, const stats::LogisticOptions& options) {
  const auto set = filter(analysis_set(profiles), [](const SpeakerProfile& p) {
    return p.role == "patient" && !p.aetiology.empty();
  });
  Table t;
  t.name = "aetiology";
  t.columns = {"section", "name", "value", "n", "status"};

  std::map<std::string, std::size_t> counts;
  for (const auto* p : set) ++counts[p->aetiology];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > 3) ranked.resize(3);
  std::sort(ranked.begin(), ranked.end());

  std::map<std::string, int> label_of;
  for (std::size_t c = 0; c < ranked.size(); ++c) label_of[ranked[c].first] = static_cast<int>(c);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (const auto* p : set) {
    const auto it = label_of.find(p->aetiology);
    if (it == label_of.end()) continue;
    std::vector<double> x(kMetricCount, kNaN);
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      if (p->metrics[m].value) x[m] = *p->metrics[m].value;
    }
    rows.push_back(std::move(x));
    labels.push_back(it->second);
  }

  try {
    if (ranked.size() < 2) fail(ErrorCode::kClassTooSmall, "need at least two patient aetiologies");
    const auto r = stats::logistic_loso(rows, labels, options);
    t.rows.push_back({std::string("summary"), std::string("accuracy"), r.accuracy, count(rows.size()), ok()});
    t.rows.push_back({std::string("summary"), std::string("chance"), 1.0 / static_cast<double>(ranked.size()),
                      count(ranked.size()), ok()});
    for (std::size_t c = 0; c < ranked.size(); ++c) {
      t.rows.push_back({std::string("recall"), ranked[c].first, r.per_class_recall[c], count(r.class_counts[c]), ok()});
    }
    std::vector<std::size_t> order(kMetricCount);
    for (std::size_t m = 0; m < kMetricCount; ++m) order[m] = m;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r.coefficients[a] > r.coefficients[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      t.rows.push_back({std::string("coefficient"), metric_names()[order[i]], r.coefficients[order[i]],
                        count(i + 1), ok()});
    }
  } catch (const Error& e) {
    t.rows.push_back({std::string("summary"), std::string("accuracy"), {}, count(rows.size()), status(e)});
  }
  return t;
}

// ---- whole report --------------------------------------------------------------------

AnalysisReport analyze(const std::vector<SpeakerProfile>& profiles, const AnalysisOptions& options) {
  AnalysisReport report;
  auto corr = severity_correlation_report(profiles, options);
  report.tables.push_back(std::move(corr.pooled));
  report.tables.push_back(std::move(corr.within_corpus));
  report.tables.push_back(std::move(corr.fdr));
  report.tables.push_back(meta_report(profiles));
  report.tables.push_back(loco_sensitivity(profiles));
  try {
    report.tables.push_back(quartile_stratification(profiles));
  } catch (const Error& e) {
    Table t;
    t.name = "quartiles";
    t.columns = {"covariate", "quartile", "covariate_min", "covariate_max", "feature", "n", "rho", "p", "status"};
    t.rows.push_back({std::string("n_phones"), {}, {}, {}, {}, count(analysis_set(profiles).size()), {}, {},
                      status(e)});
    report.tables.push_back(std::move(t));
  }
  report.tables.push_back(alignment_controls(profiles));
  report.tables.push_back(screening_report(profiles));
  report.tables.push_back(group_report(profiles));
  report.tables.push_back(aetiology_report(profiles, options.logistic));
  return report;
}

// ---- writers ---------------------------------------------------------------------------

std::string table_extension(TableFormat format) { return format == TableFormat::kCsv ? ".csv" : ".jsonl"; }

void write_table(const Table& table, std::ostream& out, TableFormat format) {
  if (format == TableFormat::kCsv) {
    csv::write_row(out, table.columns);
    std::vector<std::string> fields;
    for (const auto& row : table.rows) {
      fields.clear();
      for (const Cell& c : row) {
        if (const auto* d = std::get_if<double>(&c)) fields.push_back(csv::number(*d, 12));
        else if (const auto* i = std::get_if<std::int64_t>(&c)) fields.push_back(std::to_string(*i));
        else if (const auto* s = std::get_if<std::string>(&c)) fields.push_back(*s);
        else fields.emplace_back();
      }
      csv::write_row(out, fields);
    }
    return;
  }
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      auto& slot = obj[table.columns[i]];
      if (const auto* d = std::get_if<double>(&c)) slot = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nullptr;
      else if (const auto* n = std::get_if<std::int64_t>(&c)) slot = *n;
      else if (const auto* s = std::get_if<std::string>(&c)) slot = *s;
      else slot = nullptr;
    }
    out << obj.dump() << '\n';
  }
}

}  // namespace phonoprof
