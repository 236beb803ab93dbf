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

#include "phonoprof/phonoprof.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "analysis.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "profile.hpp"
#include "run.hpp"
#include "stats.hpp"
#include "textgrid.hpp"

using namespace phonoprof;

struct pp_options {
  RunOptions run;
};

struct pp_manifest {
  CorpusManifest manifest;
};

struct pp_profiles {
  std::vector<SpeakerProfile> profiles;
};

struct pp_textgrid {
  TextGrid grid;
};

namespace {

thread_local std::string g_last_error;

pp_status set_error(pp_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, mapping exceptions to status codes.
template <typename F>
pp_status guarded(F&& fn) {
  g_last_error.clear();
  try {
    fn();
    return PP_OK;
  } catch (const Error& e) {
    return set_error(static_cast<pp_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PP_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PP_INTERNAL_ERROR, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, what);
}

std::span<const double> view(const double* p, std::size_t n) {
  require(p != nullptr || n == 0, "null array");
  return {p, n};
}

}  // namespace

extern "C" {

const char* pp_version(void) { return "0.1.0"; }

const char* pp_status_name(pp_status status) {
  if (status == PP_INTERNAL_ERROR) return "InternalError";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* pp_last_error(void) { return g_last_error.c_str(); }

// ---- options -------------------------------------------------------------------

pp_status pp_options_create(pp_options** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new pp_options();
  });
}

void pp_options_destroy(pp_options* options) { delete options; }

pp_status pp_options_set_int(pp_options* o, const char* key, int64_t value) {
  return guarded([&] {
    require(o && key, "null argument");
    const std::string k(key);
    if (k != "seed") require(value >= 0, "value must be non-negative");
    auto& p = o->run.pipeline.profile;
    const auto u = static_cast<std::size_t>(value);
    if (k == "seed") {
      p.seed = static_cast<std::uint64_t>(value);
      o->run.analysis.seed = static_cast<std::uint64_t>(value);
    } else if (k == "bootstrap_iters") {
      require(value >= 1, "bootstrap_iters must be at least 1");
      o->run.analysis.bootstrap_iterations = u;
    } else if (k == "min_tokens") {
      require(value >= 2, "min_tokens must be at least 2");
      p.min_tokens = u;
    } else if (k == "corpus_min_tokens") {
      p.corpus_min_tokens = u;
    } else if (k == "subsample_n") {
      require(value >= 2, "subsample_n must be at least 2");
      p.subsample_n = u;
    } else if (k == "subsample_reps") {
      require(value >= 1, "subsample_reps must be at least 1");
      p.subsample_reps = u;
    } else if (k == "workers") {
      require(value >= 1, "workers must be at least 1");
      o->run.pipeline.workers = u;
    } else if (k == "robustness_variants") {
      p.robustness_variants = value != 0;
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown integer option " + k);
    }
  });
}

pp_status pp_options_set_real(pp_options* o, const char* key, double value) {
  return guarded([&] {
    require(o && key, "null argument");
    const std::string k(key);
    require(std::isfinite(value) && value >= 0.0, "value must be finite and non-negative");
    if (k == "min_duration_ms") o->run.pipeline.profile.min_duration = value / 1000.0;
    else if (k == "logistic_l2") o->run.analysis.logistic.l2 = value;
    else fail(ErrorCode::kInvalidArgument, "unknown real option " + k);
  });
}

pp_status pp_options_set_string(pp_options* o, const char* key, const char* value) {
  return guarded([&] {
    require(o && key && value, "null argument");
    const std::string k(key), v(value);
    if (k != "format") fail(ErrorCode::kInvalidArgument, "unknown string option " + k);
    if (v == "csv") o->run.format = TableFormat::kCsv;
    else if (v == "jsonl") o->run.format = TableFormat::kJsonl;
    else fail(ErrorCode::kInvalidArgument, "format must be csv or jsonl");
  });
}

// ---- runs -------------------------------------------------------------------------

namespace {
const RunOptions& run_options(const pp_options* o) {
  static const RunOptions defaults;
  return o ? o->run : defaults;
}
}  // namespace

pp_status pp_run_profile(const char* manifest_path, const char* out_dir, const pp_options* options) {
  return guarded([&] {
    require(manifest_path && out_dir, "null path");
    run_profile(manifest_path, out_dir, run_options(options));
  });
}

pp_status pp_run_directions(const char* manifest_path, const char* out_path, const pp_options* options) {
  return guarded([&] {
    require(manifest_path && out_path, "null path");
    run_directions(manifest_path, out_path, run_options(options));
  });
}

pp_status pp_run_analyze(const char* profiles_path, const char* out_dir, const pp_options* options) {
  return guarded([&] {
    require(profiles_path && out_dir, "null path");
    run_analyze(profiles_path, out_dir, run_options(options));
  });
}

pp_status pp_run_tokens(const char* const* textgrid_paths, const char* const* frames_paths,
                        const char* const* utterance_ids, size_t n, const char* speaker_id, const char* tier,
                        const char* config_path, const char* out_path, size_t* n_tokens) {
  return guarded([&] {
    require(out_path && speaker_id, "null argument");
    require(n == 0 || (textgrid_paths && frames_paths), "null path list");
    std::vector<AlignmentInput> inputs;
    for (size_t i = 0; i < n; ++i) {
      require(textgrid_paths[i] && frames_paths[i], "null path");
      inputs.push_back({textgrid_paths[i], frames_paths[i],
                        utterance_ids && utterance_ids[i] ? utterance_ids[i] : ""});
    }
    const std::size_t count =
        run_tokens(inputs, speaker_id, tier ? tier : "", config_path ? config_path : "", out_path);
    if (n_tokens) *n_tokens = count;
  });
}

void pp_synth_spec_default(pp_synth_spec* spec) {
  if (!spec) return;
  const SynthSpec d;
  std::memset(spec, 0, sizeof *spec);
  spec->dim = d.dim;
  spec->speakers_per_level = d.speakers_per_level;
  spec->tokens_per_class = d.tokens_per_class;
  spec->levels = d.schedule.size();
  for (size_t i = 0; i < d.schedule.size(); ++i) spec->schedule[i] = d.schedule[i];
  spec->sigma = d.sigma;
  spec->seed = d.seed;
  spec->corpora = d.corpora;
  spec->corner_tokens = d.corner_tokens;
  spec->utterance_length = d.utterance_length;
  spec->emit_frames = 0;
}

pp_status pp_run_synth(const pp_synth_spec* spec, const char* out_dir) {
  return guarded([&] {
    require(spec && out_dir, "null argument");
    if (spec->levels < 1 || spec->levels > 4) fail(ErrorCode::kInvalidSpec, "levels must be 1..4");
    SynthSpec s;
    s.dim = spec->dim;
    s.speakers_per_level = spec->speakers_per_level;
    s.tokens_per_class = spec->tokens_per_class;
    s.schedule.assign(spec->schedule, spec->schedule + spec->levels);
    s.sigma = spec->sigma;
    s.seed = spec->seed;
    s.corpora = spec->corpora;
    s.corner_tokens = spec->corner_tokens;
    s.utterance_length = spec->utterance_length;
    s.emit_frames = spec->emit_frames != 0;
    run_synth(s, out_dir);
  });
}

// ---- manifest / profiles ------------------------------------------------------------

pp_status pp_manifest_load(const char* path, pp_manifest** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = nullptr;
    auto m = std::make_unique<pp_manifest>();
    m->manifest = load_manifest(path);
    *out = m.release();
  });
}

void pp_manifest_destroy(pp_manifest* manifest) { delete manifest; }

size_t pp_manifest_speaker_count(const pp_manifest* manifest) {
  return manifest ? manifest->manifest.speakers.size() : 0;
}

pp_status pp_manifest_speaker_severity(const pp_manifest* manifest, size_t i, int* severity) {
  return guarded([&] {
    require(manifest && severity, "null argument");
    require(i < manifest->manifest.speakers.size(), "speaker index out of range");
    *severity = manifest->manifest.speakers[i].severity;
  });
}

pp_status pp_profiles_build(const pp_manifest* manifest, const pp_options* options, pp_profiles** out) {
  return guarded([&] {
    require(manifest && out, "null argument");
    *out = nullptr;
    const CorpusManifest& m = manifest->manifest;
    const RunOptions& o = run_options(options);
    const auto configs = load_configs(m);
    const TokenSource source = [&m](const SpeakerEntry& s, const LanguageConfig& c) {
      return load_speaker_tokens(m, s, c);
    };
    const auto dirs = build_directions(m, configs, o.pipeline, source);
    auto p = std::make_unique<pp_profiles>();
    p->profiles = build_profiles(m, configs, dirs, o.pipeline, source);
    *out = p.release();
  });
}

pp_status pp_profiles_read(const char* path, pp_profiles** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, std::string("cannot open ") + path);
    auto p = std::make_unique<pp_profiles>();
    p->profiles = read_profiles_csv(in);
    *out = p.release();
  });
}

pp_status pp_profiles_write(const pp_profiles* profiles, const char* path) {
  return guarded([&] {
    require(profiles && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, std::string("cannot write ") + path);
    write_profiles_csv(profiles->profiles, out);
    out.close();
    if (!out) fail(ErrorCode::kIo, std::string("error writing ") + path);
  });
}

void pp_profiles_destroy(pp_profiles* profiles) { delete profiles; }

size_t pp_profiles_count(const pp_profiles* profiles) { return profiles ? profiles->profiles.size() : 0; }

size_t pp_metric_count(void) { return kMetricCount; }

const char* pp_metric_name(size_t m) { return m < kMetricCount ? metric_names()[m].c_str() : nullptr; }

pp_status pp_profiles_metric(const pp_profiles* profiles, size_t i, size_t m, double* value, int* present,
                             pp_status* reason) {
  return guarded([&] {
    require(profiles && value && present, "null argument");
    require(i < profiles->profiles.size() && m < kMetricCount, "index out of range");
    const Metric& metric = profiles->profiles[i].metrics[m];
    *present = metric.value ? 1 : 0;
    *value = metric.value ? *metric.value : NAN;
    if (reason) *reason = static_cast<pp_status>(metric.reason);
  });
}

const char* pp_profiles_speaker_id(const pp_profiles* profiles, size_t i) {
  if (!profiles || i >= profiles->profiles.size()) return nullptr;
  return profiles->profiles[i].speaker_id.c_str();
}

// ---- formats ---------------------------------------------------------------------------

pp_status pp_textgrid_parse(const uint8_t* bytes, size_t size, pp_textgrid** out) {
  return guarded([&] {
    require(out && (bytes || size == 0), "null argument");
    *out = nullptr;
    auto g = std::make_unique<pp_textgrid>();
    g->grid = parse_textgrid(std::span<const std::uint8_t>(bytes, size));
    *out = g.release();
  });
}

void pp_textgrid_destroy(pp_textgrid* grid) { delete grid; }

size_t pp_textgrid_tier_count(const pp_textgrid* grid) { return grid ? grid->grid.tiers.size() : 0; }

const char* pp_textgrid_tier_name(const pp_textgrid* grid, size_t tier) {
  if (!grid || tier >= grid->grid.tiers.size()) return nullptr;
  return grid->grid.tiers[tier].name.c_str();
}

size_t pp_textgrid_interval_count(const pp_textgrid* grid, size_t tier) {
  if (!grid || tier >= grid->grid.tiers.size()) return 0;
  return grid->grid.tiers[tier].intervals.size();
}

pp_status pp_textgrid_interval(const pp_textgrid* grid, size_t tier, size_t i, double* start, double* end,
                               const char** label) {
  return guarded([&] {
    require(grid && start && end && label, "null argument");
    require(tier < grid->grid.tiers.size(), "tier index out of range");
    const auto& ivs = grid->grid.tiers[tier].intervals;
    require(i < ivs.size(), "interval index out of range");
    *start = ivs[i].start;
    *end = ivs[i].end;
    *label = ivs[i].label.c_str();
  });
}

pp_status pp_pool_phone(const float* frames, size_t frame_count, uint32_t dim, double hop, double start, double end,
                        double* out) {
  return guarded([&] {
    require(out && (frames || frame_count == 0), "null argument");
    const FrameMatrix m(dim, hop, std::vector<float>(frames, frames + frame_count * dim));
    const auto pooled = pool_phone_embedding(m, start, end);
    std::copy(pooled.begin(), pooled.end(), out);
  });
}

// ---- statistics -------------------------------------------------------------------------

pp_status pp_spearman(const double* x, const double* y, size_t n, double* rho, double* p) {
  return guarded([&] {
    require(rho && p, "null output");
    const auto r = stats::spearman(view(x, n), view(y, n));
    *rho = r.coefficient;
    *p = r.p_value;
  });
}

pp_status pp_kendall_tau(const double* x, const double* y, size_t n, double* tau, double* p) {
  return guarded([&] {
    require(tau && p, "null output");
    const auto r = stats::kendall_tau(view(x, n), view(y, n));
    *tau = r.coefficient;
    *p = r.p_value;
  });
}

pp_status pp_partial_spearman(const double* x, const double* y, const double* z, size_t n, double* rho, double* p) {
  return guarded([&] {
    require(rho && p, "null output");
    const auto r = stats::partial_spearman(view(x, n), view(y, n), view(z, n));
    *rho = r.coefficient;
    *p = r.p_value;
  });
}

pp_status pp_bootstrap_spearman_ci(const double* x, const double* y, size_t n, size_t iterations, uint64_t seed,
                                   double* lower, double* upper) {
  return guarded([&] {
    require(lower && upper, "null output");
    const auto ci =
        stats::bootstrap_ci(view(x, n), view(y, n), stats::CorrelationMethod::kSpearman, iterations, seed);
    *lower = ci.lower;
    *upper = ci.upper;
  });
}

pp_status pp_bh_fdr(const double* p, size_t n, double* adjusted) {
  return guarded([&] {
    require(adjusted || n == 0, "null output");
    const auto adj = stats::bh_fdr(view(p, n));
    std::copy(adj.begin(), adj.end(), adjusted);
  });
}

pp_status pp_mann_whitney(const double* a, size_t na, const double* b, size_t nb, double* u, double* u_a,
                          double* p) {
  return guarded([&] {
    require(u && p, "null output");
    const auto r = stats::mann_whitney(view(a, na), view(b, nb));
    *u = r.u;
    if (u_a) *u_a = r.u_a;
    *p = r.p_value;
  });
}

pp_status pp_cliffs_delta(const double* a, size_t na, const double* b, size_t nb, double* delta) {
  return guarded([&] {
    require(delta, "null output");
    *delta = stats::cliffs_delta(view(a, na), view(b, nb));
  });
}

pp_status pp_dl_meta(const double* rho, const size_t* n, size_t k, pp_meta_result* out) {
  return guarded([&] {
    require(out && ((rho && n) || k == 0), "null argument");
    std::vector<stats::Effect> effects;
    for (size_t i = 0; i < k; ++i) effects.push_back({rho[i], n[i]});
    const auto m = stats::dl_meta(effects);
    out->k = m.k;
    out->pooled_rho = m.pooled_rho;
    out->tau2 = m.tau2;
    out->i2 = m.i2;
    out->q = m.q_stat;
    out->dl_lower = m.dl_ci.lower;
    out->dl_upper = m.dl_ci.upper;
    out->dl_p = m.dl_p;
    out->hksj_lower = m.hksj_ci.lower;
    out->hksj_upper = m.hksj_ci.upper;
    out->hksj_p = m.hksj_p;
    out->has_prediction_interval = m.prediction_interval ? 1 : 0;
    out->pi_lower = m.prediction_interval ? m.prediction_interval->lower : NAN;
    out->pi_upper = m.prediction_interval ? m.prediction_interval->upper : NAN;
  });
}

pp_status pp_roc(const double* scores, const uint8_t* labels, size_t n, int higher_is_positive, double* auc,
                 double* threshold, double* sensitivity, double* specificity) {
  return guarded([&] {
    require(auc && (labels || n == 0), "null argument");
    const auto r = stats::roc(view(scores, n), std::span<const std::uint8_t>(labels, n),
                              higher_is_positive ? stats::ScoreDirection::kHigherIsPositive
                                                 : stats::ScoreDirection::kLowerIsPositive);
    *auc = r.auc;
    if (threshold) *threshold = r.optimal_threshold;
    if (sensitivity) *sensitivity = r.sensitivity;
    if (specificity) *specificity = r.specificity;
  });
}

pp_status pp_normal_quantile(double p, double* out) {
  return guarded([&] {
    require(out, "null output");
    *out = stats::normal_quantile(p);
  });
}

pp_status pp_student_t_quantile(double p, double df, double* out) {
  return guarded([&] {
    require(out, "null output");
    *out = stats::student_t_quantile(p, df);
  });
}

pp_status pp_heron_area(double a, double b, double c, double* area) {
  return guarded([&] {
    require(area, "null output");
    *area = heron_area(a, b, c);
  });
}

pp_status pp_dprime(const double* pos, size_t n_pos, const double* neg, size_t n_neg, double* d_prime) {
  return guarded([&] {
    require(d_prime, "null output");
    *d_prime = dprime_from_projections(view(pos, n_pos), view(neg, n_neg)).d_prime;
  });
}

pp_status pp_map_intelligibility(double pct, int* severity) {
  return guarded([&] {
    require(severity, "null output");
    *severity = severity_ordinal(map_intelligibility(pct));
  });
}

}  // extern "C"
