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

// Corpus-level analyses over speaker profiles.  Each section returns a Table;
// failures of a statistic are written into the row's status column rather
// than aborting the report.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "profile.hpp"
#include "stats.hpp"

namespace phonoprof {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(std::string_view col) const;
  const Cell& at(std::size_t row, std::string_view col) const;
  // NaN when the cell is empty or not numeric.
  double number(std::size_t row, std::string_view col) const;
  std::string text(std::size_t row, std::string_view col) const;
  // Index of the first row whose cells match every (column, text) pair.
  std::size_t find(std::initializer_list<std::pair<std::string_view, std::string_view>> keys) const;
};

struct AnalysisOptions {
  std::uint64_t seed = 42;
  std::size_t bootstrap_iterations = 1000;
  stats::LogisticOptions logistic;
};

// Speakers entering the analyses: not excluded and with a severity ordinal.
std::vector<const SpeakerProfile*> analysis_set(const std::vector<SpeakerProfile>& profiles);

struct CorrelationTables {
  Table pooled;         // correlations
  Table within_corpus;  // within_corpus
  Table fdr;            // fdr
};

// Pooled Spearman per metric with bootstrap CI and Kendall tau; within-corpus
// Spearman for corpora with at least three severity levels; BH-FDR over every
// test emitted in the two tables.
CorrelationTables severity_correlation_report(const std::vector<SpeakerProfile>& profiles,
                                              const AnalysisOptions& options);
Table loco_sensitivity(const std::vector<SpeakerProfile>& profiles);
// Throws StratumTooSmall below 8 speakers.
Table quartile_stratification(const std::vector<SpeakerProfile>& profiles,
                              std::span<const std::size_t> metrics = {});
Table alignment_controls(const std::vector<SpeakerProfile>& profiles);
Table screening_report(const std::vector<SpeakerProfile>& profiles);
Table meta_report(const std::vector<SpeakerProfile>& profiles);
Table group_report(const std::vector<SpeakerProfile>& profiles);
Table aetiology_report(const std::vector<SpeakerProfile>& profiles, const stats::LogisticOptions& options = {});

// Mean of the present consonant d' values when at least 3 of 5 are present.
std::optional<double> mean_consonant_dprime(const SpeakerProfile& p);

struct AnalysisReport {
  std::vector<Table> tables;
  const Table& table(std::string_view name) const;
};

AnalysisReport analyze(const std::vector<SpeakerProfile>& profiles, const AnalysisOptions& options);

enum class TableFormat { kCsv, kJsonl };

void write_table(const Table& table, std::ostream& out, TableFormat format);
std::string table_extension(TableFormat format);

}  // namespace phonoprof
