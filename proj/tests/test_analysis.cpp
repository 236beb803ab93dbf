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
#include <sstream>

#include "analysis.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace phonoprof;
using testutil::error_of;

namespace {

// Every metric = -severity * slope + noise; covariates independent of severity.
struct Builder {
  CounterRng rng{1};
  double slope = 1.0;
  double noise = 0.5;

  SpeakerProfile make(const std::string& corpus, const std::string& id, int severity) {
    SpeakerProfile p;
    p.speaker_id = id;
    p.corpus = corpus;
    p.language = "en";
    p.role = severity == 0 ? "control" : "patient";
    p.aetiology = severity == 0 ? "healthy" : "parkinsons";
    p.severity = severity;
    p.n_phones = 100 + rng.next_below(900);
    p.n_utterances = 10 + rng.next_below(40);
    p.phones_per_utterance = double(p.n_phones) / double(p.n_utterances);
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      p.metrics[m].value = -slope * severity + noise * rng.next_gaussian();
    }
    for (std::size_t k = 0; k < kFeatureCount; ++k) p.subsampled[k] = p.filtered30[k] = p.metrics[k];
    return p;
  }

  void add(std::vector<SpeakerProfile>& out, const std::string& corpus, int severity, int n) {
    for (int i = 0; i < n; ++i) out.push_back(make(corpus, corpus + "_s" + std::to_string(severity) + "_" + std::to_string(i), severity));
  }
};

std::vector<SpeakerProfile> levels(Builder& b, const std::string& corpus, int per_level, int lo = 0, int hi = 3) {
  std::vector<SpeakerProfile> out;
  for (int s = lo; s <= hi; ++s) b.add(out, corpus, s, per_level);
  return out;
}

void append(std::vector<SpeakerProfile>& a, const std::vector<SpeakerProfile>& b) { a.insert(a.end(), b.begin(), b.end()); }

}  // namespace

TEST_CASE("monotone degradation gives strong negative correlations") {
  Builder b;
  b.noise = 0.3;
  const auto p = levels(b, "c1", 25);
  const auto t = severity_correlation_report(p, {}).pooled;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    CHECK(t.text(r, "status") == "ok");
    CHECK(t.number(r, "rho") <= -0.9);
    CHECK(t.number(r, "ci_upper") < 0.0);
    CHECK(t.number(r, "n") == 100);
  }
}

TEST_CASE("pairwise-complete n and FDR over emitted tests") {
  Builder b;
  auto p = levels(b, "c1", 10);
  // only nasality and voicing present; everything else absent
  for (auto& sp : p) {
    for (std::size_t m = 2; m < kMetricCount; ++m) sp.metrics[m] = {std::nullopt, ErrorCode::kInsufficientTokens};
  }
  p[0].metrics[1] = {std::nullopt, ErrorCode::kZeroVariance};
  const auto rep = severity_correlation_report(p, {});
  CHECK(rep.pooled.number(0, "n") == 40);
  CHECK(rep.pooled.number(1, "n") == 39);
  CHECK(rep.pooled.text(2, "status") == "TooFewPairs");
  // pooled (2) + within-corpus for c1 (2)
  REQUIRE(rep.fdr.rows.size() == 4);
  std::vector<double> ps;
  for (std::size_t r = 0; r < 4; ++r) ps.push_back(rep.fdr.number(r, "p"));
  const auto adj = oracle::bh(ps);
  for (std::size_t r = 0; r < 4; ++r) CHECK(rep.fdr.number(r, "p_fdr") == doctest::Approx(adj[r]).epsilon(1e-12));
}

TEST_CASE("corpora with fewer than three levels stay out of the within-corpus table") {
  Builder b;
  auto p = levels(b, "full", 8);
  b.add(p, "flat", 3, 12);
  append(p, levels(b, "two", 6, 0, 1));
  const auto w = severity_correlation_report(p, {}).within_corpus;
  for (std::size_t r = 0; r < w.rows.size(); ++r) CHECK(w.text(r, "corpus") == "full");
  CHECK(w.rows.size() == kMetricCount);
}

TEST_CASE("leave-one-corpus-out") {
  Builder b;
  auto p = levels(b, "a", 15);
  append(p, levels(b, "b", 15));
  const auto t = loco_sensitivity(p);
  CHECK(t.rows.size() == kConsonantFeatureCount * 3);
  CHECK(t.text(0, "scope") == "baseline");
  CHECK(t.text(1, "removed_corpus") == "a");
  for (std::size_t r = 0; r < t.rows.size(); ++r) CHECK(std::abs(t.number(r, "delta_rho")) < 0.05);

  // corpus "ctl" holds every control; dropping it truncates the severity range
  Builder w;
  w.noise = 1.0;
  std::vector<SpeakerProfile> q;
  w.add(q, "ctl", 0, 40);
  w.add(q, "ctl", 1, 10);
  for (int s = 1; s <= 3; ++s) w.add(q, "pat", s, 20);
  const auto lt = loco_sensitivity(q);
  const auto base = lt.find({{"feature", "nasality"}, {"scope", "baseline"}});
  const auto drop = lt.find({{"feature", "nasality"}, {"removed_corpus", "ctl"}});
  CHECK(std::abs(lt.number(drop, "rho")) < std::abs(lt.number(base, "rho")));
  CHECK(lt.number(drop, "delta_rho") > 0.0);
}

TEST_CASE("token-count quartiles") {
  Builder b;
  std::vector<SpeakerProfile> p;
  for (int i = 0; i < 200; ++i) {
    const int sev = i % 4;
    auto sp = b.make("c", "s" + std::to_string(i), sev);
    sp.n_phones = static_cast<std::size_t>(100 + 10 * i);
    // noise shrinks as the token count grows
    const double noise = 400.0 / static_cast<double>(sp.n_phones);
    for (auto& m : sp.metrics) m.value = -sev + noise * b.rng.next_gaussian();
    p.push_back(sp);
  }
  const auto t = quartile_stratification(p);
  CHECK(t.rows.size() == 4 * kConsonantFeatureCount);
  for (std::size_t q = 0; q < 4; ++q) CHECK(t.number(q * kConsonantFeatureCount, "n") == 50);
  double rho[4];
  for (std::size_t q = 0; q < 4; ++q) rho[q] = t.number(q * kConsonantFeatureCount, "rho");
  CHECK(std::abs(rho[0]) < std::abs(rho[1]));
  CHECK(std::abs(rho[0]) < std::abs(rho[3]));

  std::vector<SpeakerProfile> few(p.begin(), p.begin() + 7);
  CHECK(error_of([&] { quartile_stratification(few); }) == ErrorCode::kStratumTooSmall);
}

TEST_CASE("alignment controls") {
  Builder b;
  b.noise = 1.5;
  const auto p = levels(b, "c", 60);
  const auto t = alignment_controls(p);
  const auto kept = t.find({{"variant", "bottom_decile_kept"}});
  CHECK(t.number(kept, "n") == std::ceil(0.9 * 240));
  for (const char* f : {"nasality", "voicing", "round"}) {
    const double raw = t.number(t.find({{"feature", f}, {"variant", "raw"}}), "rho");
    const double part = t.number(t.find({{"feature", f}, {"variant", "partial_phones_per_utterance"}}), "rho");
    CHECK(std::abs(raw - part) < 0.02);
    CHECK(t.text(t.find({{"feature", f}, {"variant", "subsampled"}}), "status") == "ok");
  }
}

TEST_CASE("screening") {
  Builder b;
  b.noise = 0.2;
  auto p = levels(b, "c", 20);
  auto t = screening_report(p);
  CHECK(t.rows.size() == 12);
  for (std::size_t r = 0; r < t.rows.size(); ++r) CHECK(t.number(r, "auc") > 0.95);
  CHECK(t.text(5, "feature") == "mean_consonant");

  // nasality missing for every severe speaker
  for (auto& sp : p) {
    if (sp.severity == 3) sp.metrics[0] = {std::nullopt, ErrorCode::kInsufficientTokens};
  }
  t = screening_report(p);
  CHECK(t.text(t.find({{"task", "severe_vs_rest"}, {"feature", "nasality"}}), "status") == "SingleClass");
  CHECK(t.text(t.find({{"task", "severe_vs_rest"}, {"feature", "mean_consonant"}}), "status") == "ok");
}

TEST_CASE("mean consonant d' needs three of five") {
  SpeakerProfile p;
  p.metrics[0].value = 1.0;
  p.metrics[1].value = 2.0;
  CHECK(!mean_consonant_dprime(p));
  p.metrics[4].value = 6.0;
  CHECK(mean_consonant_dprime(p) == 3.0);
  p.metrics[5].value = 100.0;  // vowel feature, ignored
  CHECK(mean_consonant_dprime(p) == 3.0);
}

TEST_CASE("meta-analysis across corpora") {
  Builder b;
  b.noise = 1.0;
  std::vector<SpeakerProfile> homo;
  for (const char* c : {"a", "b", "c", "d", "e"}) append(homo, levels(b, c, 30));
  auto t = meta_report(homo);
  auto pooled = t.find({{"feature", "nasality"}, {"row", "pooled"}});
  CHECK(t.number(pooled, "k") == 5);
  CHECK(t.number(pooled, "i2") < 0.3);

  std::vector<SpeakerProfile> hetero;
  const double noises[] = {0.2, 0.3, 0.5, 0.8, 1.2, 1.6};
  const char* names[] = {"u", "v", "w", "x", "y", "z"};
  for (int i = 0; i < 6; ++i) {
    Builder h;
    h.rng = CounterRng(100 + i);
    h.noise = noises[i];
    append(hetero, levels(h, names[i], 30));
  }
  t = meta_report(hetero);
  pooled = t.find({{"feature", "nasality"}, {"row", "pooled"}});
  CHECK(t.number(pooled, "i2") > 0.5);
  CHECK(t.number(pooled, "rho") < 0.0);
  CHECK(t.number(pooled, "hksj_upper") < 0.0);

  // one eligible corpus, one too small
  std::vector<SpeakerProfile> single = levels(b, "big", 10);
  append(single, levels(b, "tiny", 1, 0, 2));
  t = meta_report(single);
  CHECK(t.text(t.find({{"feature", "nasality"}, {"corpus", "tiny"}}), "status") == "Ineligible");
  CHECK(t.text(t.find({{"feature", "nasality"}, {"row", "pooled"}}), "status") == "TooFewStudies");
}

TEST_CASE("control versus severe") {
  Builder b;
  const auto p = levels(b, "c", 10);
  const auto t = group_report(p);
  CHECK(t.number(0, "n_control") == 10);
  CHECK(t.number(0, "cliffs_delta") > 0.63);
  CHECK(t.text(0, "direction") == "control_greater");
}

TEST_CASE("aetiology discrimination") {
  Builder b;
  std::vector<SpeakerProfile> p;
  const char* names[] = {"als", "cerebral_palsy", "parkinsons"};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 20; ++i) {
      auto sp = b.make("c", std::string(names[c]) + std::to_string(i), 1 + i % 3);
      sp.aetiology = names[c];
      sp.metrics[c].value = *sp.metrics[c].value + 8.0;
      p.push_back(sp);
    }
  }
  auto t = aetiology_report(p);
  CHECK(t.number(t.find({{"name", "accuracy"}}), "value") >= 0.9);
  CHECK(t.number(t.find({{"name", "chance"}}), "value") == doctest::Approx(1.0 / 3.0));

  // labels unrelated to the metrics
  Builder nb;
  std::vector<SpeakerProfile> shuffled;
  for (int i = 0; i < 60; ++i) {
    auto sp = nb.make("c", "s" + std::to_string(i), 1 + i % 3);
    sp.aetiology = names[nb.rng.next_below(3)];
    shuffled.push_back(sp);
  }
  t = aetiology_report(shuffled);
  CHECK(std::abs(t.number(t.find({{"name", "accuracy"}}), "value") - 1.0 / 3.0) <= 0.15);

  p.resize(41);  // parkinsons left with one speaker
  t = aetiology_report(p);
  CHECK(t.text(t.find({{"name", "accuracy"}}), "status") == "ClassTooSmall");
}

TEST_CASE("whole report and writers") {
  Builder b;
  auto p = levels(b, "c1", 8);
  append(p, levels(b, "c2", 8));
  p[0].excluded = true;
  const auto rep = analyze(p, {});
  const char* names[] = {"correlations", "within_corpus", "fdr", "meta", "loco", "quartiles", "alignment", "roc",
                         "groups", "aetiology"};
  REQUIRE(rep.tables.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(rep.tables[i].name == names[i]);
  CHECK(rep.table("correlations").number(0, "n") == 63);

  std::ostringstream csv, jsonl;
  write_table(rep.table("correlations"), csv, TableFormat::kCsv);
  write_table(rep.table("correlations"), jsonl, TableFormat::kJsonl);
  CHECK(csv.str().rfind("feature,n,rho,", 0) == 0);
  CHECK(jsonl.str().rfind("{\"feature\":\"nasality\",\"n\":63,", 0) == 0);
}
