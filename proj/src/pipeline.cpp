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

#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "textgrid.hpp"

namespace phonoprof {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string required_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    fail(ErrorCode::kSchemaError, where + ": \"" + key + "\" must be a non-empty string");
  }
  return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return "";
  if (!it->is_string()) fail(ErrorCode::kSchemaError, where + ": \"" + key + "\" must be a string");
  return it->get<std::string>();
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  if (p.empty()) return p;
  const fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.lexically_normal().string();
  return (fs::path(base_dir) / path).lexically_normal().string();
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.  The exception from
// the lowest failing index is rethrown so failures are reported the same way
// regardless of scheduling.
template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<PhoneToken> apply_duration_filter(std::vector<PhoneToken> tokens, double min_duration) {
  if (min_duration > 0.0) return filter_short_tokens(tokens, min_duration);
  return tokens;
}

}  // namespace

const CorpusEntry& CorpusManifest::corpus(const std::string& name) const {
  for (const auto& c : corpora) {
    if (c.name == name) return c;
  }
  fail(ErrorCode::kSchemaError, "unknown corpus \"" + name + "\"");
}

std::string_view role_name(Role r) { return r == Role::kControl ? "control" : "patient"; }

int resolve_severity(const SpeakerEntry& s) {
  std::optional<int> from_label, from_pct;
  if (s.severity_label) {
    const auto sev = severity_from_label(*s.severity_label);
    if (!sev) fail(ErrorCode::kSchemaError, s.key() + ": unknown severity label \"" + *s.severity_label + "\"");
    from_label = severity_ordinal(*sev);
  }
  if (s.intelligibility_pct) from_pct = severity_ordinal(map_intelligibility(*s.intelligibility_pct));
  if (from_label && from_pct && *from_label != *from_pct) {
    fail(ErrorCode::kConflictingSeverity,
         s.key() + ": severity label \"" + *s.severity_label + "\" disagrees with intelligibility " +
             csv::number(*s.intelligibility_pct, 6) + "% (" +
             std::string(severity_name(static_cast<Severity>(*from_pct))) + ")");
  }
  if (from_label) return *from_label;
  if (from_pct) return *from_pct;
  if (s.role == Role::kControl) return 0;
  fail(ErrorCode::kSchemaError, s.key() + ": patient needs severity_label or intelligibility_pct");
}

CorpusManifest parse_manifest(std::string_view json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kSchemaError, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorCode::kSchemaError, "manifest must be a JSON object");

  CorpusManifest m;
  m.base_dir = base_dir;

  const auto corpora = root.find("corpora");
  if (corpora == root.end() || !corpora->is_array()) fail(ErrorCode::kSchemaError, "\"corpora\" must be an array");
  std::set<std::string> corpus_names;
  for (const auto& c : *corpora) {
    if (!c.is_object()) fail(ErrorCode::kSchemaError, "corpus entries must be objects");
    CorpusEntry e;
    e.name = required_string(c, "name", "corpus");
    const std::string where = "corpus " + e.name;
    e.language = required_string(c, "language", where);
    e.aetiology = optional_string(c, "aetiology", where);
    e.control_corpus = optional_string(c, "control_corpus", where);
    e.tier = optional_string(c, "tier", where);
    if (!corpus_names.insert(e.name).second) fail(ErrorCode::kSchemaError, "corpus \"" + e.name + "\" listed twice");
    m.corpora.push_back(std::move(e));
  }
  for (const auto& c : m.corpora) {
    if (!c.control_corpus.empty() && !corpus_names.count(c.control_corpus)) {
      fail(ErrorCode::kSchemaError, "corpus " + c.name + ": control_corpus \"" + c.control_corpus + "\" is not listed");
    }
  }

  if (auto lc = root.find("language_configs"); lc != root.end() && !lc->is_null()) {
    if (!lc->is_object()) fail(ErrorCode::kSchemaError, "\"language_configs\" must map language to path");
    for (const auto& [lang, path] : lc->items()) {
      if (!path.is_string()) fail(ErrorCode::kSchemaError, "language_configs." + lang + " must be a path");
      m.language_config_paths[lang] = resolve_path(base_dir, path.get<std::string>());
    }
  }

  const auto speakers = root.find("speakers");
  if (speakers == root.end() || !speakers->is_array()) fail(ErrorCode::kSchemaError, "\"speakers\" must be an array");
  std::set<std::string> keys;
  for (const auto& s : *speakers) {
    if (!s.is_object()) fail(ErrorCode::kSchemaError, "speaker entries must be objects");
    SpeakerEntry e;
    e.speaker_id = required_string(s, "speaker_id", "speaker");
    e.corpus = required_string(s, "corpus", "speaker " + e.speaker_id);
    const std::string where = "speaker " + e.key();
    if (!corpus_names.count(e.corpus)) fail(ErrorCode::kSchemaError, where + ": corpus is not listed");
    const CorpusEntry& corpus = m.corpus(e.corpus);
    e.language = optional_string(s, "language", where);
    if (e.language.empty()) e.language = corpus.language;
    e.aetiology = optional_string(s, "aetiology", where);
    if (e.aetiology.empty()) e.aetiology = corpus.aetiology;

    const std::string role = required_string(s, "role", where);
    if (role == "control") e.role = Role::kControl;
    else if (role == "patient") e.role = Role::kPatient;
    else fail(ErrorCode::kSchemaError, where + ": role must be \"control\" or \"patient\"");

    if (auto it = s.find("severity_label"); it != s.end() && !it->is_null()) {
      if (!it->is_string()) fail(ErrorCode::kSchemaError, where + ": severity_label must be a string");
      e.severity_label = it->get<std::string>();
    }
    if (auto it = s.find("intelligibility_pct"); it != s.end() && !it->is_null()) {
      if (!it->is_number()) fail(ErrorCode::kSchemaError, where + ": intelligibility_pct must be a number");
      e.intelligibility_pct = it->get<double>();
    }
    if (auto it = s.find("utterance_count"); it != s.end() && !it->is_null()) {
      if (!it->is_number_unsigned()) fail(ErrorCode::kSchemaError, where + ": utterance_count must be a count");
      e.utterance_count = it->get<std::size_t>();
    }

    const auto utts = s.find("utterances");
    e.token_table_path = resolve_path(base_dir, optional_string(s, "token_table_path", where));
    const bool has_utts = utts != s.end() && !utts->is_null();
    if (has_utts == !e.token_table_path.empty()) {
      fail(ErrorCode::kSchemaError, where + ": give exactly one of \"utterances\" or \"token_table_path\"");
    }
    if (has_utts) {
      if (!utts->is_array()) fail(ErrorCode::kSchemaError, where + ": utterances must be an array");
      for (const auto& u : *utts) {
        if (!u.is_object()) fail(ErrorCode::kSchemaError, where + ": utterance entries must be objects");
        UtteranceEntry ue;
        ue.utterance_id = required_string(u, "utterance_id", where);
        ue.textgrid_path = resolve_path(base_dir, required_string(u, "textgrid_path", where));
        ue.frames_path = resolve_path(base_dir, required_string(u, "frames_path", where));
        e.utterances.push_back(std::move(ue));
      }
    }
    e.severity = resolve_severity(e);
    if (!keys.insert(e.key()).second) {
      fail(ErrorCode::kDuplicateSpeaker, "speaker \"" + e.speaker_id + "\" appears twice in corpus " + e.corpus);
    }
    m.speakers.push_back(std::move(e));
  }
  std::sort(m.speakers.begin(), m.speakers.end(), [](const SpeakerEntry& a, const SpeakerEntry& b) {
    return std::tie(a.corpus, a.speaker_id) < std::tie(b.corpus, b.speaker_id);
  });
  return m;
}

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_manifest(ss.str(), fs::path(path).parent_path().string());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::map<std::string, LanguageConfig> load_configs(const CorpusManifest& manifest) {
  std::set<std::string> languages;
  for (const auto& c : manifest.corpora) languages.insert(c.language);
  for (const auto& s : manifest.speakers) languages.insert(s.language);
  std::map<std::string, LanguageConfig> out;
  for (const auto& lang : languages) {
    if (auto it = manifest.language_config_paths.find(lang); it != manifest.language_config_paths.end()) {
      LanguageConfig cfg = load_language_config_file(it->second);
      if (cfg.language != lang) {
        fail(ErrorCode::kSchemaError, it->second + ": config declares language \"" + cfg.language +
                                          "\" but is mapped to \"" + lang + "\"");
      }
      out.emplace(lang, std::move(cfg));
    } else if (lang == "en") {
      out.emplace(lang, english_default_config());
    } else {
      fail(ErrorCode::kSchemaError, "no language config for \"" + lang + "\"");
    }
  }
  return out;
}

std::vector<PhoneToken> tokens_from_alignment(const std::string& textgrid_path, const std::string& frames_path,
                                              const std::string& tier, const std::string& speaker_id,
                                              const std::string& utterance_id,
                                              const std::set<std::string>& silence_labels) {
  const TextGrid grid = read_textgrid_file(textgrid_path);
  std::vector<PhoneInterval> intervals;
  try {
    intervals = extract_phone_intervals(grid, tier, utterance_id, silence_labels);
  } catch (const Error& e) {
    throw Error(e.code(), textgrid_path + ": " + e.what());
  }
  const FrameMatrix frames = read_frames_file(frames_path);
  try {
    return pool_utterance(frames, intervals, speaker_id);
  } catch (const Error& e) {
    throw Error(e.code(), frames_path + ": " + e.what());
  }
}

std::vector<PhoneToken> load_speaker_tokens(const CorpusManifest& manifest, const SpeakerEntry& speaker,
                                            const LanguageConfig& config) {
  if (!speaker.token_table_path.empty()) return read_tokens_file(speaker.token_table_path);
  const std::string& tier = manifest.corpus(speaker.corpus).tier;
  std::vector<PhoneToken> tokens;
  for (const auto& u : speaker.utterances) {
    auto part = tokens_from_alignment(u.textgrid_path, u.frames_path, tier, speaker.speaker_id, u.utterance_id,
                                      config.silence_labels);
    tokens.insert(tokens.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return tokens;
}

std::string direction_reference(const CorpusManifest& manifest, const SpeakerEntry& speaker) {
  const CorpusEntry& corpus = manifest.corpus(speaker.corpus);
  if (!corpus.control_corpus.empty()) return "corpus:" + corpus.control_corpus;
  return "language:" + speaker.language;
}

std::map<std::string, DirectionReference> build_directions(const CorpusManifest& manifest,
                                                           const std::map<std::string, LanguageConfig>& configs,
                                                           const PipelineOptions& options,
                                                           const TokenSource& source) {
  std::map<std::string, DirectionReference> out;
  for (const auto& s : manifest.speakers) {
    const std::string ref = direction_reference(manifest, s);
    if (out.count(ref)) continue;
    DirectionReference& r = out[ref];
    r.reference = ref;
    std::vector<const SpeakerEntry*> controls;
    if (ref.rfind("corpus:", 0) == 0) {
      const std::string name = ref.substr(7);
      r.language = manifest.corpus(name).language;
      for (const auto& c : manifest.speakers) {
        if (c.role == Role::kControl && c.corpus == name) controls.push_back(&c);
      }
    } else {
      r.language = s.language;
      for (const auto& c : manifest.speakers) {
        if (c.role == Role::kControl && c.language == r.language) controls.push_back(&c);
      }
    }
    if (controls.empty()) {
      fail(ErrorCode::kNoControlsForLanguage,
           "no control speakers for " + ref + " (needed by speaker " + s.key() + ")");
    }
    const LanguageConfig& config = configs.at(r.language);
    std::vector<DirectionAccumulator> acc;
    for (Feature f : kAllFeatures) acc.emplace_back(config.spec(f), config.normalize_symbols);

    // Load a batch in parallel, then fold it in manifest order so the sums
    // are the same for any worker count.
    const std::size_t batch = std::max<std::size_t>(options.workers, 1);
    for (std::size_t first = 0; first < controls.size(); first += batch) {
      const std::size_t n = std::min(batch, controls.size() - first);
      std::vector<std::vector<PhoneToken>> loaded(n);
      parallel_for(n, options.workers, [&](std::size_t i) {
        const SpeakerEntry& c = *controls[first + i];
        loaded[i] = apply_duration_filter(source(c, configs.at(c.language)), options.profile.min_duration);
      });
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& a : acc) a.add(loaded[i]);
        r.control_speakers.push_back(controls[first + i]->key());
      }
    }
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      try {
        r.directions[k].direction = acc[k].finish(r.language);
      } catch (const Error& e) {
        r.directions[k].reason = e.code();
      }
    }
  }
  return out;
}

std::vector<SpeakerProfile> build_profiles(const CorpusManifest& manifest,
                                           const std::map<std::string, LanguageConfig>& configs,
                                           const std::map<std::string, DirectionReference>& directions,
                                           const PipelineOptions& options, const TokenSource& source) {
  std::vector<SpeakerProfile> out(manifest.speakers.size());
  parallel_for(manifest.speakers.size(), options.workers, [&](std::size_t i) {
    const SpeakerEntry& s = manifest.speakers[i];
    const LanguageConfig& config = configs.at(s.language);
    const auto ref = directions.find(direction_reference(manifest, s));
    if (ref == directions.end()) fail(ErrorCode::kNoControlsForLanguage, "no directions for speaker " + s.key());
    SpeakerProfile p = speaker_profile(s.key(), source(s, config), ref->second.directions, config, options.profile);
    p.speaker_id = s.speaker_id;
    p.corpus = s.corpus;
    p.language = s.language;
    p.aetiology = s.aetiology;
    p.role = std::string(role_name(s.role));
    p.severity = s.severity;
    if (!s.utterances.empty() || s.utterance_count) {
      p.n_utterances = s.utterance_count ? *s.utterance_count : s.utterances.size();
      p.phones_per_utterance =
          p.n_utterances ? static_cast<double>(p.n_phones) / static_cast<double>(p.n_utterances) : 0.0;
    }
    out[i] = std::move(p);
  });
  return out;
}

void write_directions_json(const std::map<std::string, DirectionReference>& directions, std::ostream& out) {
  json refs = json::array();
  for (const auto& [key, r] : directions) {
    json feats = json::array();
    for (Feature f : kAllFeatures) {
      const DirectionSlot& slot = r.directions[static_cast<std::size_t>(f)];
      json entry = {{"feature", feature_name(f)}};
      if (slot.direction) {
        entry["n_positive"] = slot.direction->n_positive;
        entry["n_negative"] = slot.direction->n_negative;
        entry["direction"] = slot.direction->direction;
      } else {
        entry["error"] = error_code_name(slot.reason);
      }
      feats.push_back(std::move(entry));
    }
    refs.push_back({{"reference", r.reference},
                    {"language", r.language},
                    {"control_speakers", r.control_speakers},
                    {"features", std::move(feats)}});
  }
  out << json{{"references", std::move(refs)}}.dump(1) << '\n';
}

// ---- profiles.csv -----------------------------------------------------------

namespace {

constexpr std::array<const char*, 10> kIdentityColumns = {
    "speaker_id", "corpus", "language", "aetiology", "role", "severity",
    "excluded", "n_phones", "n_utterances", "phones_per_utterance"};

std::string variant_name(std::size_t feature, const char* suffix) {
  return metric_names()[feature] + suffix;
}

}  // namespace

std::vector<std::string> profile_csv_columns() {
  std::vector<std::string> cols(kIdentityColumns.begin(), kIdentityColumns.end());
  for (const auto& m : metric_names()) cols.push_back(m);
  for (std::size_t k = 0; k < kFeatureCount; ++k) cols.push_back(variant_name(k, "_sub"));
  for (std::size_t k = 0; k < kFeatureCount; ++k) cols.push_back(variant_name(k, "_dur30"));
  cols.push_back("absent");
  return cols;
}

void write_profiles_csv(const std::vector<SpeakerProfile>& profiles, std::ostream& out) {
  csv::write_row(out, profile_csv_columns());
  std::vector<std::string> row;
  for (const auto& p : profiles) {
    row.clear();
    row.push_back(p.speaker_id);
    row.push_back(p.corpus);
    row.push_back(p.language);
    row.push_back(p.aetiology);
    row.push_back(p.role);
    row.push_back(p.severity ? std::to_string(*p.severity) : "");
    row.push_back(p.excluded ? "1" : "0");
    row.push_back(std::to_string(p.n_phones));
    row.push_back(std::to_string(p.n_utterances));
    row.push_back(csv::number(p.phones_per_utterance));
    std::string absent;
    auto add = [&](const Metric& m, const std::string& name) {
      if (m.value) {
        row.push_back(csv::number(*m.value));
        return;
      }
      row.push_back("");
      if (!absent.empty()) absent += ';';
      absent += name + "=" + error_code_name(m.reason);
    };
    for (std::size_t k = 0; k < kMetricCount; ++k) add(p.metrics[k], metric_names()[k]);
    for (std::size_t k = 0; k < kFeatureCount; ++k) add(p.subsampled[k], variant_name(k, "_sub"));
    for (std::size_t k = 0; k < kFeatureCount; ++k) add(p.filtered30[k], variant_name(k, "_dur30"));
    row.push_back(absent);
    csv::write_row(out, row);
  }
}

namespace {

double parse_double(const std::string& s, std::size_t line, const std::string& column) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    fail(ErrorCode::kSchemaError, "profiles line " + std::to_string(line) + ": " + column + " is not a number");
  }
  return v;
}

std::size_t parse_count(const std::string& s, std::size_t line, const std::string& column) {
  const double v = parse_double(s, line, column);
  if (v < 0 || v != std::floor(v)) {
    fail(ErrorCode::kSchemaError, "profiles line " + std::to_string(line) + ": " + column + " is not a count");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<SpeakerProfile> read_profiles_csv(std::istream& in) {
  std::vector<std::string> header, row;
  std::size_t line = 0;
  if (!csv::read_row(in, header, line)) fail(ErrorCode::kEmptyFile, "profiles file is empty");
  const auto expected = profile_csv_columns();
  if (header != expected) fail(ErrorCode::kSchemaError, "profiles header does not match the expected columns");

  std::vector<SpeakerProfile> out;
  while (csv::read_row(in, row, line)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != expected.size()) {
      fail(ErrorCode::kSchemaError, "profiles line " + std::to_string(line) + " has " + std::to_string(row.size()) +
                                        " fields, expected " + std::to_string(expected.size()));
    }
    SpeakerProfile p;
    std::size_t c = 0;
    p.speaker_id = row[c++];
    p.corpus = row[c++];
    p.language = row[c++];
    p.aetiology = row[c++];
    p.role = row[c++];
    if (p.role != "control" && p.role != "patient") {
      fail(ErrorCode::kSchemaError, "profiles line " + std::to_string(line) + ": bad role \"" + p.role + "\"");
    }
    if (!row[c].empty()) {
      const std::size_t sev = parse_count(row[c], line, "severity");
      if (sev > 3) fail(ErrorCode::kSchemaError, "profiles line " + std::to_string(line) + ": severity above 3");
      p.severity = static_cast<int>(sev);
    }
    ++c;
    p.excluded = row[c++] == "1";
    p.n_phones = parse_count(row[c++], line, "n_phones");
    p.n_utterances = parse_count(row[c++], line, "n_utterances");
    p.phones_per_utterance = parse_double(row[c++], line, "phones_per_utterance");

    std::map<std::string, ErrorCode> reasons;
    std::stringstream absent(row.back());
    std::string item;
    while (std::getline(absent, item, ';')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      const auto code = error_code_from_name(item.substr(eq + 1));
      reasons[item.substr(0, eq)] = code ? *code : ErrorCode::kInvalidArgument;
    }
    auto take = [&](Metric& m) {
      const std::string& name = expected[c];
      if (row[c].empty()) {
        const auto it = reasons.find(name);
        m = {std::nullopt, it == reasons.end() ? ErrorCode::kInvalidArgument : it->second};
      } else {
        m = {parse_double(row[c], line, name), ErrorCode::kOk};
      }
      ++c;
    };
    for (auto& m : p.metrics) take(m);
    for (auto& m : p.subsampled) take(m);
    for (auto& m : p.filtered30) take(m);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace phonoprof
