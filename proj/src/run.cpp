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

#include "run.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace phonoprof {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) fail(ErrorCode::kIo, "error writing " + path.string());
}

ordered_json profile_params(const RunOptions& o) {
  const ProfileOptions& p = o.pipeline.profile;
  return {{"min_tokens", p.min_tokens},         {"corpus_min_tokens", p.corpus_min_tokens},
          {"subsample_n", p.subsample_n},       {"subsample_reps", p.subsample_reps},
          {"seed", p.seed},                     {"min_duration_s", p.min_duration}};
}

struct Profiled {
  CorpusManifest manifest;
  std::map<std::string, LanguageConfig> configs;
  std::map<std::string, DirectionReference> directions;
  std::vector<SpeakerProfile> profiles;
};

Profiled profile_manifest(const std::string& manifest_path, const RunOptions& options, bool with_profiles) {
  Profiled out;
  out.manifest = load_manifest(manifest_path);
  out.configs = load_configs(out.manifest);
  const auto& configs = out.configs;
  const CorpusManifest& m = out.manifest;
  const TokenSource source = [&m](const SpeakerEntry& s, const LanguageConfig& c) {
    return load_speaker_tokens(m, s, c);
  };
  out.directions = build_directions(m, configs, options.pipeline, source);
  if (with_profiles) out.profiles = build_profiles(m, configs, out.directions, options.pipeline, source);
  return out;
}

}  // namespace

void run_profile(const std::string& manifest_path, const std::string& out_dir, const RunOptions& options) {
  const Profiled run = profile_manifest(manifest_path, options, true);
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  {
    auto out = open_out(dir / "profiles.csv");
    write_profiles_csv(run.profiles, out);
    close_out(out, dir / "profiles.csv");
  }
  {
    auto out = open_out(dir / "directions.json");
    write_directions_json(run.directions, out);
    close_out(out, dir / "directions.json");
  }
  auto log = open_out(dir / "run.jsonl");
  std::size_t excluded = 0;
  for (const auto& p : run.profiles) excluded += p.excluded;
  log << ordered_json{{"event", "profile"},
                      {"manifest", fs::path(manifest_path).filename().string()},
                      {"params", profile_params(options)},
                      {"speakers", run.profiles.size()},
                      {"excluded_below_token_minimum", excluded}}
             .dump()
      << '\n';
  for (const auto& [lang, cfg] : run.configs) {
    log << ordered_json{{"event", "language_config"}, {"language", lang}, {"incomplete", cfg.incomplete}}.dump() << '\n';
  }
  for (const auto& [key, ref] : run.directions) {
    ordered_json feats = ordered_json::object();
    for (Feature f : kAllFeatures) {
      const DirectionSlot& slot = ref.directions[static_cast<std::size_t>(f)];
      feats[std::string(feature_name(f))] = slot.direction ? "ok" : error_code_name(slot.reason);
    }
    log << ordered_json{{"event", "directions"},
                        {"reference", key},
                        {"language", ref.language},
                        {"controls", ref.control_speakers.size()},
                        {"features", feats}}
               .dump()
        << '\n';
  }
  close_out(log, dir / "run.jsonl");
}

void run_directions(const std::string& manifest_path, const std::string& out_path, const RunOptions& options) {
  const Profiled run = profile_manifest(manifest_path, options, false);
  const fs::path path(out_path);
  if (path.has_parent_path()) ensure_dir(path.parent_path().string());
  auto out = open_out(path);
  write_directions_json(run.directions, out);
  close_out(out, path);
}

void run_analyze(const std::string& profiles_path, const std::string& out_dir, const RunOptions& options) {
  std::ifstream in(profiles_path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open profiles " + profiles_path);
  std::vector<SpeakerProfile> profiles;
  try {
    profiles = read_profiles_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), profiles_path + ": " + e.what());
  }
  const AnalysisReport report = analyze(profiles, options.analysis);

  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  auto log = open_out(dir / "run.jsonl");
  log << ordered_json{{"event", "analyze"},
                      {"profiles", fs::path(profiles_path).filename().string()},
                      {"seed", options.analysis.seed},
                      {"bootstrap_iterations", options.analysis.bootstrap_iterations},
                      {"logistic_l2", options.analysis.logistic.l2},
                      {"speakers", profiles.size()},
                      {"analysed", analysis_set(profiles).size()}}
             .dump()
      << '\n';
  for (const Table& t : report.tables) {
    const std::string file = t.name + table_extension(options.format);
    auto out = open_out(dir / file);
    write_table(t, out, options.format);
    close_out(out, dir / file);
    log << ordered_json{{"event", "table"}, {"name", t.name}, {"file", file}, {"rows", t.rows.size()}}.dump() << '\n';
  }
  close_out(log, dir / "run.jsonl");
}

std::size_t run_tokens(const std::vector<AlignmentInput>& inputs, const std::string& speaker_id,
                       const std::string& tier, const std::string& config_path, const std::string& out_path) {
  const std::set<std::string> silence =
      config_path.empty() ? default_silence_labels() : load_language_config_file(config_path).silence_labels;
  std::vector<PhoneToken> tokens;
  for (const auto& in : inputs) {
    const std::string uid = in.utterance_id.empty() ? fs::path(in.textgrid_path).stem().string() : in.utterance_id;
    auto part = tokens_from_alignment(in.textgrid_path, in.frames_path, tier, speaker_id, uid, silence);
    tokens.insert(tokens.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const fs::path path(out_path);
  if (path.has_parent_path()) ensure_dir(path.parent_path().string());
  write_tokens_file(tokens, out_path);
  return tokens.size();
}

void run_synth(const SynthSpec& spec, const std::string& out_dir) {
  write_synth(generate_synth(spec), out_dir);
}

}  // namespace phonoprof
