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

// Synthetic corpora with a known separation per severity level.
//
// Every feature gets its own pair of phone symbols ("<feature>+" and
// "<feature>-").  A token of feature k is drawn as
//     embedding = +-(delta / 2) * u_k + sigma * g,   g ~ N(0, I)
// where u_k is a hidden unit direction and delta = schedule[level] * sigma,
// so the analytic d' of a speaker at that level is schedule[level].  Corner
// vowels sit at schedule[level] * sigma * v_c with the same noise, which
// makes the vowel triangle shrink with severity as well.

#include <cstdint>
#include <string>
#include <vector>

#include "embed_io.hpp"
#include "feature_config.hpp"
#include "pipeline.hpp"

namespace phonoprof {

struct SynthSpec {
  std::uint32_t dim = 16;
  std::size_t speakers_per_level = 50;
  std::size_t tokens_per_class = 200;
  // Separation in units of sigma; index is the severity ordinal (0 = control).
  std::vector<double> schedule = {3.0, 2.0, 1.0, 0.5};
  double sigma = 1.0;
  std::uint64_t seed = 42;
  std::size_t corpora = 1;
  std::size_t corner_tokens = 20;
  std::size_t utterance_length = 12;
  // Place tokens on a 60 ms grid so that write_synth can also emit FRM1 +
  // TextGrid pairs that pool back to the same tokens.
  bool emit_frames = false;
};

// Throws InvalidSpec.
void validate(const SynthSpec& spec);

struct SynthSpeaker {
  SpeakerEntry entry;
  std::vector<PhoneToken> tokens;
  double expected_dprime = 0.0;
};

struct SynthCorpus {
  SynthSpec spec;
  LanguageConfig config;
  std::vector<std::vector<double>> hidden_directions;  // one per feature
  std::vector<SynthSpeaker> speakers;                  // sorted by key
  CorpusManifest manifest;                             // in-memory, no paths

  // Token source for build_directions / build_profiles over `manifest`.
  TokenSource source() const;
};

SynthCorpus generate_synth(const SynthSpec& spec);

// Language config text for the synthetic phone inventory.
std::string synth_config_text();

// Writes manifest.json, synth_lang.json, synth.jsonl and one PET1 table per
// speaker under dir.  With spec.emit_frames each utterance is also written
// as an FRM1 file (three identical frames per token, 20 ms hop, preceded by
// a silence) plus a TextGrid, and the manifest lists utterances instead of
// token tables.
void write_synth(const SynthCorpus& corpus, const std::string& dir);

}  // namespace phonoprof
