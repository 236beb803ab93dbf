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

// phonoprof command line: profile, analyze, directions, tokens, synth.

#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phonoprof/phonoprof.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

void error_record(const std::string& error, int code, const std::string& message) {
  const nlohmann::ordered_json rec = {{"error", error}, {"code", code}, {"message", message}};
  std::fprintf(stderr, "%s\n", rec.dump().c_str());
}

int exit_code(pp_status s) {
  if (s == PP_OK) return 0;
  if (s == PP_INVALID_ARGUMENT) return kExitUsage;
  if (s >= PP_INSUFFICIENT_TOKENS && s <= PP_STRATUM_TOO_SMALL) return kExitNumeric;
  return kExitData;
}

int report(pp_status s) {
  if (s != PP_OK) error_record(pp_status_name(s), static_cast<int>(s), pp_last_error());
  return exit_code(s);
}

struct Globals {
  std::int64_t seed = 42;
  std::int64_t bootstrap_iters = 1000;
  std::int64_t min_tokens = 5;
  std::int64_t subsample_n = 30;
  std::int64_t subsample_reps = 100;
  double min_duration_ms = 0.0;
  std::string format = "csv";
  std::int64_t workers = 0;
  bool no_variants = false;
};

class Options {
 public:
  ~Options() { pp_options_destroy(o_); }

  pp_status init(const Globals& g) {
    pp_status s = pp_options_create(&o_);
    const std::int64_t workers =
        g.workers > 0 ? g.workers : std::max<std::int64_t>(1, std::thread::hardware_concurrency());
    if (!s) s = pp_options_set_int(o_, "seed", g.seed);
    if (!s) s = pp_options_set_int(o_, "bootstrap_iters", g.bootstrap_iters);
    if (!s) s = pp_options_set_int(o_, "min_tokens", g.min_tokens);
    if (!s) s = pp_options_set_int(o_, "subsample_n", g.subsample_n);
    if (!s) s = pp_options_set_int(o_, "subsample_reps", g.subsample_reps);
    if (!s) s = pp_options_set_int(o_, "workers", workers);
    if (!s) s = pp_options_set_int(o_, "robustness_variants", g.no_variants ? 0 : 1);
    if (!s) s = pp_options_set_real(o_, "min_duration_ms", g.min_duration_ms);
    if (!s) s = pp_options_set_string(o_, "format", g.format.c_str());
    return s;
  }

  const pp_options* get() const { return o_; }

 private:
  pp_options* o_ = nullptr;
};

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phonological-subspace profiling of speech embeddings"};
  app.set_version_flag("--version", std::string(pp_version()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--bootstrap-iters", g.bootstrap_iters, "Bootstrap resamples")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--min-tokens", g.min_tokens, "Minimum tokens per class for d'")->capture_default_str()->check(CLI::Range(2, 1 << 30));
  app.add_option("--subsample-n", g.subsample_n, "Tokens per class in subsampled d'")->capture_default_str()->check(CLI::Range(2, 1 << 30));
  app.add_option("--subsample-reps", g.subsample_reps, "Subsampling repetitions")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--min-duration-ms", g.min_duration_ms, "Drop phones shorter than this (0 = off)")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--format", g.format, "Report table format")->capture_default_str()->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--workers", g.workers, "Worker threads (0 = all cores)")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_flag("--no-variants", g.no_variants, "Skip the subsampled and 30 ms d' variants");

  std::string manifest, out, profiles, speaker, tier, config;
  std::vector<std::string> textgrids, frames, utt_ids;

  auto* profile = app.add_subcommand("profile", "Build speaker profiles from a manifest");
  profile->add_option("--manifest", manifest, "Corpus manifest (JSON)")->required()->check(CLI::ExistingFile);
  profile->add_option("--out", out, "Output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "Compute report tables from a profiles file");
  analyze->add_option("--profiles", profiles, "profiles.csv")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", out, "Output directory")->required();

  auto* directions = app.add_subcommand("directions", "Estimate contrast directions from control speakers");
  directions->add_option("--manifest", manifest, "Corpus manifest (JSON)")->required()->check(CLI::ExistingFile);
  directions->add_option("--out", out, "Output file (JSON)")->required();

  auto* tokens = app.add_subcommand("tokens", "Pool frame embeddings over aligned phones into a token table");
  tokens->add_option("--textgrid", textgrids, "Alignment TextGrid (repeatable)")->required()->check(CLI::ExistingFile);
  tokens->add_option("--frames", frames, "Frame embedding file (repeatable, same order)")->required()->check(CLI::ExistingFile);
  tokens->add_option("--utterance-id", utt_ids, "Utterance id per pair (default: file stem)");
  tokens->add_option("--speaker", speaker, "Speaker id")->required();
  tokens->add_option("--tier", tier, "Phone tier name (default: detected)");
  tokens->add_option("--config", config, "Language config (default: built-in English)")->check(CLI::ExistingFile);
  tokens->add_option("--out", out, "Output token table")->required();

  pp_synth_spec spec;
  pp_synth_spec_default(&spec);
  std::vector<double> schedule(spec.schedule, spec.schedule + spec.levels);
  bool emit_frames = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--dim", spec.dim, "Embedding dimension")->capture_default_str();
  synth->add_option("--speakers-per-level", spec.speakers_per_level, "Speakers per severity level")->capture_default_str();
  synth->add_option("--tokens-per-class", spec.tokens_per_class, "Tokens per feature class")->capture_default_str();
  synth->add_option("--schedule", schedule, "Class separation per level, in sigma units (1 to 4 values)")
      ->expected(1, 4)->delimiter(',');
  synth->add_option("--sigma", spec.sigma, "Within-class standard deviation")->capture_default_str();
  synth->add_option("--corpora", spec.corpora, "Number of corpora")->capture_default_str();
  synth->add_option("--corner-tokens", spec.corner_tokens, "Tokens per vowel corner")->capture_default_str();
  synth->add_flag("--emit-frames", emit_frames, "Also write TextGrid and frame files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("UsageError", kExitUsage, e.what());
    return kExitUsage;
  }

  Options opts;
  if (pp_status s = opts.init(g)) return report(s);

  if (*profile) return report(pp_run_profile(manifest.c_str(), out.c_str(), opts.get()));
  if (*analyze) return report(pp_run_analyze(profiles.c_str(), out.c_str(), opts.get()));
  if (*directions) return report(pp_run_directions(manifest.c_str(), out.c_str(), opts.get()));
  if (*tokens) {
    if (frames.size() != textgrids.size() || (!utt_ids.empty() && utt_ids.size() != textgrids.size())) {
      error_record("UsageError", kExitUsage, "--textgrid, --frames and --utterance-id must pair up");
      return kExitUsage;
    }
    const auto tg = c_strings(textgrids), fr = c_strings(frames), ids = c_strings(utt_ids);
    std::size_t n = 0;
    const pp_status s = pp_run_tokens(tg.data(), fr.data(), ids.empty() ? nullptr : ids.data(), tg.size(),
                                      speaker.c_str(), tier.c_str(), config.c_str(), out.c_str(), &n);
    if (s == PP_OK) std::printf("%zu tokens\n", n);
    return report(s);
  }
  if (*synth) {
    spec.levels = schedule.size();
    for (std::size_t i = 0; i < schedule.size(); ++i) spec.schedule[i] = schedule[i];
    spec.seed = static_cast<std::uint64_t>(g.seed);
    spec.emit_frames = emit_frames ? 1 : 0;
    return report(pp_run_synth(&spec, out.c_str()));
  }
  return kExitUsage;
}
