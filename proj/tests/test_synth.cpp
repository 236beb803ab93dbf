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
#include <filesystem>
#include <map>

#include "pipeline.hpp"
#include "synth.hpp"
#include "test_util.hpp"

using namespace phonoprof;
using testutil::error_of;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> snapshot(const std::string& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = testutil::read_file(e.path().string());
  }
  return out;
}

SynthSpec small_spec() {
  SynthSpec s;
  s.dim = 8;
  s.speakers_per_level = 3;
  s.tokens_per_class = 20;
  s.seed = 5;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  auto bad = [](auto mutate) {
    SynthSpec s = small_spec();
    mutate(s);
    return error_of([&] { validate(s); });
  };
  CHECK(bad([](SynthSpec&) {}) == ErrorCode::kOk);
  CHECK(bad([](SynthSpec& s) { s.dim = 1; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.speakers_per_level = 0; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.tokens_per_class = 0; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.schedule = {}; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.schedule = {1, 1, 1, 1, 1}; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.schedule = {1, -0.5}; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.schedule = {1, NAN}; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.sigma = 0; }) == ErrorCode::kInvalidSpec);
  CHECK(bad([](SynthSpec& s) { s.corpora = 0; }) == ErrorCode::kInvalidSpec);
  SynthSpec s = small_spec();
  s.sigma = -1;
  CHECK(error_of([&] { generate_synth(s); }) == ErrorCode::kInvalidSpec);
}

TEST_CASE("generated corpus shape") {
  SynthSpec s = small_spec();
  s.corpora = 2;
  const auto c = generate_synth(s);
  // speakers are dealt round-robin over the corpora
  CHECK(c.speakers.size() == 4 * 3);
  std::map<std::string, int> per_corpus;
  for (const auto& sp : c.speakers) ++per_corpus[sp.entry.corpus];
  CHECK(per_corpus.size() == 2);
  CHECK(c.hidden_directions.size() == kFeatureCount);
  for (const auto& u : c.hidden_directions) {
    double n2 = 0;
    for (double v : u) n2 += v * v;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (const auto& sp : c.speakers) {
    const int level = resolve_severity(sp.entry);
    CHECK(sp.expected_dprime == s.schedule[static_cast<std::size_t>(level)]);
    CHECK(sp.entry.speaker_id.rfind("L" + std::to_string(level) + "_S", 0) == 0);
    // 2 classes per feature plus three corners
    CHECK(sp.tokens.size() == kFeatureCount * 2 * s.tokens_per_class + 3 * s.corner_tokens);
    for (const auto& t : sp.tokens) CHECK(t.embedding.size() == s.dim);
  }
  CHECK(c.manifest.speakers.size() == c.speakers.size());
}

TEST_CASE("same seed gives identical files") {
  testutil::TempDir a("synth_a"), b("synth_b"), d("synth_d");
  SynthSpec s = small_spec();
  write_synth(generate_synth(s), a.str());
  write_synth(generate_synth(s), b.str());
  const auto sa = snapshot(a.str());
  CHECK(sa.count("manifest.json") == 1);
  CHECK(sa.count("synth.jsonl") == 1);
  CHECK(sa == snapshot(b.str()));
  s.seed = 6;
  write_synth(generate_synth(s), d.str());
  CHECK(sa != snapshot(d.str()));
}

TEST_CASE("recovered d' tracks the schedule") {
  SynthSpec s;
  s.dim = 16;
  s.speakers_per_level = 10;
  s.tokens_per_class = 200;
  s.seed = 11;
  const auto c = generate_synth(s);
  const std::map<std::string, LanguageConfig> configs = {{"synth", c.config}};
  PipelineOptions opt;
  opt.profile.robustness_variants = false;
  const auto dirs = build_directions(c.manifest, configs, opt, c.source());
  const auto p = build_profiles(c.manifest, configs, dirs, opt, c.source());
  REQUIRE(p.size() == c.speakers.size());
  double sum[4] = {0, 0, 0, 0};
  std::size_t n[4] = {0, 0, 0, 0};
  for (const auto& sp : p) {
    const auto lvl = static_cast<std::size_t>(*sp.severity);
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      REQUIRE(sp.metrics[k].value);
      sum[lvl] += *sp.metrics[k].value;
      ++n[lvl];
    }
    REQUIRE(sp.metrics[kVowelTriangleArea].value);
  }
  for (std::size_t l = 0; l < 4; ++l) {
    const double mean = sum[l] / static_cast<double>(n[l]);
    CHECK(std::abs(mean - s.schedule[l]) / s.schedule[l] < 0.1);
  }
}
