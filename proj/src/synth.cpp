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

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "textgrid.hpp"

namespace phonoprof {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr double kHop = 0.020;
constexpr std::size_t kFramesPerToken = 3;
constexpr std::array<const char*, 3> kCorners = {"i", "a", "u"};
constexpr std::array<const char*, 3> kAetiologies = {"parkinsons", "als", "cerebral_palsy"};

std::vector<double> random_unit(CounterRng& rng, std::uint32_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.next_gaussian();
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

// Seconds rounded to the microsecond, i.e. exactly what a TextGrid written
// with six decimals reads back as.
double grid_time(std::size_t frame) {
  return std::round(static_cast<double>(frame) * kHop * 1e6) / 1e6;
}

std::string speaker_name(std::size_t level, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%zu_S%03zu", level, index);
  return buf;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory " + p.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

void validate(const SynthSpec& s) {
  auto bad = [](const std::string& msg) { fail(ErrorCode::kInvalidSpec, msg); };
  if (s.dim < 2) bad("dim must be at least 2");
  if (s.speakers_per_level == 0) bad("speakers_per_level must be positive");
  if (s.tokens_per_class == 0) bad("tokens_per_class must be positive");
  if (s.schedule.empty() || s.schedule.size() > 4) bad("schedule needs 1 to 4 severity levels");
  for (double d : s.schedule) {
    if (!std::isfinite(d) || d < 0.0) bad("schedule entries must be finite and non-negative");
  }
  if (!std::isfinite(s.sigma) || s.sigma <= 0.0) bad("sigma must be positive");
  if (s.corpora == 0) bad("corpora must be positive");
  if (s.utterance_length == 0) bad("utterance_length must be positive");
}

std::string synth_config_text() {
  ordered_json features = ordered_json::object();
  for (Feature f : kAllFeatures) {
    const std::string name(feature_name(f));
    features[name] = {{"positive", {name + "+"}}, {"negative", {name + "-"}}};
  }
  ordered_json cfg = {{"language", "synth"},
                      {"silence", {"", "sil"}},
                      {"normalize_symbols", false},
                      {"corner_vowels", {{"i", {"i"}}, {"a", {"a"}}, {"u", {"u"}}}},
                      {"features", features}};
  return cfg.dump(2) + "\n";
}

SynthCorpus generate_synth(const SynthSpec& spec) {
  validate(spec);
  SynthCorpus out;
  out.spec = spec;
  out.config = load_language_config(synth_config_text());

  CounterRng dir_rng(derive_key(spec.seed, "directions"));
  for (std::size_t k = 0; k < kFeatureCount; ++k) out.hidden_directions.push_back(random_unit(dir_rng, spec.dim));
  std::array<std::vector<double>, 3> corners;
  for (auto& c : corners) c = random_unit(dir_rng, spec.dim);

  for (std::size_t c = 0; c < spec.corpora; ++c) {
    out.manifest.corpora.push_back({"synth" + std::to_string(c + 1), "synth", "", "", ""});
  }

  const std::uint64_t speaker_root = derive_key(spec.seed, "speaker");
  for (std::size_t level = 0; level < spec.schedule.size(); ++level) {
    for (std::size_t i = 0; i < spec.speakers_per_level; ++i) {
      SynthSpeaker sp;
      SpeakerEntry& e = sp.entry;
      e.speaker_id = speaker_name(level, i);
      e.corpus = out.manifest.corpora[i % spec.corpora].name;
      e.language = "synth";
      e.role = level == 0 ? Role::kControl : Role::kPatient;
      e.aetiology = level == 0 ? "healthy" : kAetiologies[i % kAetiologies.size()];
      if (level > 0) e.severity_label = std::string(severity_name(static_cast<Severity>(level)));
      e.severity = static_cast<int>(level);
      sp.expected_dprime = spec.schedule[level];

      CounterRng rng(derive_key(speaker_root, e.key()));
      const double sep = spec.schedule[level] * spec.sigma;
      auto draw = [&](const std::string& phone, const std::vector<double>& centre, double scale) {
        PhoneToken t;
        t.speaker_id = e.speaker_id;
        t.phone = phone;
        t.embedding.resize(spec.dim);
        for (std::uint32_t d = 0; d < spec.dim; ++d) {
          t.embedding[d] = static_cast<float>(scale * centre[d] + spec.sigma * rng.next_gaussian());
        }
        sp.tokens.push_back(std::move(t));
      };
      for (Feature f : kAllFeatures) {
        const auto k = static_cast<std::size_t>(f);
        const std::string name(feature_name(f));
        for (std::size_t j = 0; j < spec.tokens_per_class; ++j) draw(name + "+", out.hidden_directions[k], 0.5 * sep);
        for (std::size_t j = 0; j < spec.tokens_per_class; ++j) draw(name + "-", out.hidden_directions[k], -0.5 * sep);
      }
      for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t j = 0; j < spec.corner_tokens; ++j) draw(kCorners[c], corners[c], sep);
      }

      // random order, then cut into utterances
      rng.partial_shuffle(sp.tokens, sp.tokens.size());
      double clock = 0.0;
      for (std::size_t j = 0; j < sp.tokens.size(); ++j) {
        PhoneToken& t = sp.tokens[j];
        const std::size_t utt = j / spec.utterance_length;
        const std::size_t pos = j % spec.utterance_length;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s_u%04zu", e.speaker_id.c_str(), utt);
        t.utterance_id = buf;
        t.position_index = static_cast<std::uint32_t>(pos);
        if (spec.emit_frames) {
          const std::size_t first = kFramesPerToken * (pos + 1);
          t.start = grid_time(first);
          t.end = grid_time(first + kFramesPerToken);
        } else {
          if (pos == 0) clock = 0.0;
          const double dur = 0.020 + 0.130 * rng.next_unit();
          t.start = clock;
          t.end = clock + dur;
          clock = t.end;
        }
      }
      out.speakers.push_back(std::move(sp));
    }
  }
  std::sort(out.speakers.begin(), out.speakers.end(),
            [](const SynthSpeaker& a, const SynthSpeaker& b) { return a.entry.key() < b.entry.key(); });
  for (const auto& sp : out.speakers) out.manifest.speakers.push_back(sp.entry);
  return out;
}

TokenSource SynthCorpus::source() const {
  auto index = std::make_shared<std::map<std::string, std::size_t>>();
  for (std::size_t i = 0; i < speakers.size(); ++i) (*index)[speakers[i].entry.key()] = i;
  return [this, index](const SpeakerEntry& s, const LanguageConfig&) {
    const auto it = index->find(s.key());
    if (it == index->end()) fail(ErrorCode::kSchemaError, "no synthetic tokens for " + s.key());
    return speakers[it->second].tokens;
  };
}

void write_synth(const SynthCorpus& corpus, const std::string& dir) {
  const SynthSpec& spec = corpus.spec;
  const fs::path root(dir);
  ensure_dir(root);
  write_text(root / "synth_lang.json", synth_config_text());

  ordered_json corpora = ordered_json::array();
  for (const auto& c : corpus.manifest.corpora) {
    corpora.push_back({{"name", c.name}, {"language", c.language}});
  }
  ordered_json speakers = ordered_json::array();
  std::string log;
  {
    ordered_json head = {{"event", "synth"},
                         {"generator", "splitmix64 counter stream, Box-Muller gaussians"},
                         {"seed", spec.seed},
                         {"dim", spec.dim},
                         {"speakers_per_level", spec.speakers_per_level},
                         {"tokens_per_class", spec.tokens_per_class},
                         {"schedule", spec.schedule},
                         {"sigma", spec.sigma},
                         {"corpora", spec.corpora},
                         {"corner_tokens", spec.corner_tokens},
                         {"utterance_length", spec.utterance_length},
                         {"emit_frames", spec.emit_frames}};
    log += head.dump() + "\n";
  }

  for (const auto& sp : corpus.speakers) {
    const SpeakerEntry& e = sp.entry;
    ordered_json entry = {{"speaker_id", e.speaker_id},
                          {"corpus", e.corpus},
                          {"role", std::string(role_name(e.role))},
                          {"aetiology", e.aetiology}};
    if (e.severity_label) entry["severity_label"] = *e.severity_label;
    const fs::path spk_dir = root / "tokens" / e.corpus;
    ensure_dir(spk_dir);
    const std::string rel_table = "tokens/" + e.corpus + "/" + e.speaker_id + ".pet";
    write_tokens_file(sp.tokens, (root / rel_table).string());

    if (spec.emit_frames) {
      const fs::path utt_dir = root / "alignments" / e.corpus / e.speaker_id;
      ensure_dir(utt_dir);
      ordered_json utts = ordered_json::array();
      std::size_t j = 0;
      while (j < sp.tokens.size()) {
        std::size_t k = j;
        while (k < sp.tokens.size() && sp.tokens[k].utterance_id == sp.tokens[j].utterance_id) ++k;
        const std::string& uid = sp.tokens[j].utterance_id;
        const std::size_t n_frames = kFramesPerToken * (k - j + 1);
        std::vector<float> values(n_frames * spec.dim, 0.0f);
        TextGrid grid;
        grid.xmin = 0.0;
        grid.xmax = grid_time(n_frames);
        Tier words{"words", Tier::Kind::kInterval, 0.0, grid.xmax, {{0.0, grid.xmax, "w"}}};
        Tier phones{"phones", Tier::Kind::kInterval, 0.0, grid.xmax, {}};
        phones.intervals.push_back({0.0, grid_time(kFramesPerToken), "sil"});
        for (std::size_t t = j; t < k; ++t) {
          const PhoneToken& tok = sp.tokens[t];
          phones.intervals.push_back({tok.start, tok.end, tok.phone});
          const std::size_t first = kFramesPerToken * (tok.position_index + 1);
          for (std::size_t f = first; f < first + kFramesPerToken; ++f) {
            std::copy(tok.embedding.begin(), tok.embedding.end(), values.begin() + static_cast<std::ptrdiff_t>(f * spec.dim));
          }
        }
        grid.tiers = {std::move(words), std::move(phones)};
        const std::string rel_tg = "alignments/" + e.corpus + "/" + e.speaker_id + "/" + uid + ".TextGrid";
        const std::string rel_frm = "alignments/" + e.corpus + "/" + e.speaker_id + "/" + uid + ".frm";
        write_text(root / rel_tg, serialize_textgrid_long(grid));
        write_frames_file(FrameMatrix(spec.dim, kHop, std::move(values)), (root / rel_frm).string());
        utts.push_back({{"utterance_id", uid}, {"textgrid_path", rel_tg}, {"frames_path", rel_frm}});
        j = k;
      }
      entry["utterances"] = std::move(utts);
    } else {
      entry["token_table_path"] = rel_table;
    }
    speakers.push_back(std::move(entry));

    ordered_json line = {{"event", "speaker"},
                         {"speaker_id", e.speaker_id},
                         {"corpus", e.corpus},
                         {"severity", e.severity},
                         {"expected_dprime", sp.expected_dprime},
                         {"n_tokens", sp.tokens.size()}};
    log += line.dump() + "\n";
  }

  ordered_json manifest = {{"corpora", corpora},
                           {"language_configs", {{"synth", "synth_lang.json"}}},
                           {"speakers", speakers}};
  write_text(root / "manifest.json", manifest.dump(1) + "\n");
  write_text(root / "synth.jsonl", log);
}

}  // namespace phonoprof
