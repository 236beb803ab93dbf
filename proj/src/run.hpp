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

// File-level entry points behind the command-line subcommands.

#include <string>
#include <vector>

#include "analysis.hpp"
#include "pipeline.hpp"
#include "synth.hpp"

namespace phonoprof {

struct RunOptions {
  PipelineOptions pipeline;
  AnalysisOptions analysis;
  TableFormat format = TableFormat::kCsv;
};

// manifest -> out_dir/{profiles.csv, directions.json, run.jsonl}
void run_profile(const std::string& manifest_path, const std::string& out_dir, const RunOptions& options);

// manifest -> directions JSON file
void run_directions(const std::string& manifest_path, const std::string& out_path, const RunOptions& options);

// profiles.csv -> out_dir/<table>.{csv,jsonl} + run.jsonl
void run_analyze(const std::string& profiles_path, const std::string& out_dir, const RunOptions& options);

struct AlignmentInput {
  std::string textgrid_path;
  std::string frames_path;
  std::string utterance_id;  // empty: file stem of the TextGrid
};

// TextGrid + FRM1 pairs -> one PET1 table.
std::size_t run_tokens(const std::vector<AlignmentInput>& inputs, const std::string& speaker_id,
                       const std::string& tier, const std::string& config_path, const std::string& out_path);

void run_synth(const SynthSpec& spec, const std::string& out_dir);

}  // namespace phonoprof
