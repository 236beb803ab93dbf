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

// Corpus manifest, control-derived directions and speaker profiling over a
// whole manifest.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "embed_io.hpp"
#include "feature_config.hpp"
#include "profile.hpp"

namespace phonoprof {

struct CorpusEntry {
  std::string name;
  std::string language;
  std::string aetiology;
  // Corpus whose controls provide the directions for this corpus.
  std::string control_corpus;
  // Phone tier name; empty uses the default selector.
  std::string tier;
};

struct UtteranceEntry {
  std::string utterance_id;
  std::string textgrid_path;
  std::string frames_path;
};

enum class Role { kControl, kPatient };

struct SpeakerEntry {
  std::string speaker_id;
  std::string corpus;
  std::string language;
  std::string aetiology;
  Role role = Role::kPatient;
  std::optional<std::string> severity_label;
  std::optional<double> intelligibility_pct;
  // Resolved ordinal: label, then intelligibility, then control role.
  int severity = 0;
  std::vector<UtteranceEntry> utterances;
  std::string token_table_path;
  // Utterances processed for a token-table speaker; defaults to the number
  // of distinct utterance ids in the table.
  std::optional<std::size_t> utterance_count;

  std::string key() const { return corpus + "/" + speaker_id; }
};

struct CorpusManifest {
  std::vector<CorpusEntry> corpora;
  // Sorted by (corpus, speaker_id).
  std::vector<SpeakerEntry> speakers;
  std::map<std::string, std::string> language_config_paths;
  std::string base_dir;

  const CorpusEntry& corpus(const std::string& name) const;
};

// Relative paths are resolved against base_dir.
CorpusManifest parse_manifest(std::string_view json_text, const std::string& base_dir);
CorpusManifest load_manifest(const std::string& path);

// Severity ordinal per the precedence rule; throws ConflictingSeverity or
// SchemaError.
int resolve_severity(const SpeakerEntry& speaker);

std::string_view role_name(Role r);

// One config per language named in the manifest.  "en" falls back to the
// built-in English mapping when no file is given.
std::map<std::string, LanguageConfig> load_configs(const CorpusManifest& manifest);

using TokenSource = std::function<std::vector<PhoneToken>(const SpeakerEntry&, const LanguageConfig&)>;

// Reads a speaker's PET1 table or pools its TextGrid/FRM1 pairs.
std::vector<PhoneToken> load_speaker_tokens(const CorpusManifest& manifest, const SpeakerEntry& speaker,
                                            const LanguageConfig& config);

// Tokens of one utterance from a TextGrid and its frame file.
std::vector<PhoneToken> tokens_from_alignment(const std::string& textgrid_path, const std::string& frames_path,
                                              const std::string& tier, const std::string& speaker_id,
                                              const std::string& utterance_id,
                                              const std::set<std::string>& silence_labels);

struct PipelineOptions {
  ProfileOptions profile;
  std::size_t workers = 1;
};

struct DirectionReference {
  std::string reference;  // "language:<lang>" or "corpus:<name>"
  std::string language;
  std::vector<std::string> control_speakers;
  DirectionSet directions;
};

// Reference key used for a speaker's directions.
std::string direction_reference(const CorpusManifest& manifest, const SpeakerEntry& speaker);

// Directions for every reference used by the manifest, from controls only.
// Throws NoControlsForLanguage when a reference has no control speakers.
std::map<std::string, DirectionReference> build_directions(const CorpusManifest& manifest,
                                                           const std::map<std::string, LanguageConfig>& configs,
                                                           const PipelineOptions& options,
                                                           const TokenSource& source);

// Profiles in manifest speaker order; identical for any worker count.
std::vector<SpeakerProfile> build_profiles(const CorpusManifest& manifest,
                                           const std::map<std::string, LanguageConfig>& configs,
                                           const std::map<std::string, DirectionReference>& directions,
                                           const PipelineOptions& options, const TokenSource& source);

void write_directions_json(const std::map<std::string, DirectionReference>& directions, std::ostream& out);

// profiles.csv: identity columns, covariates, the 12 metrics, the d'
// variants and an `absent` column listing metric=Reason for missing values.
void write_profiles_csv(const std::vector<SpeakerProfile>& profiles, std::ostream& out);
std::vector<SpeakerProfile> read_profiles_csv(std::istream& in);
std::vector<std::string> profile_csv_columns();

}  // namespace phonoprof
