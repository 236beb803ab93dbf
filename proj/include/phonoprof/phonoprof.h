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

#ifndef PHONOPROF_PHONOPROF_H_
#define PHONOPROF_PHONOPROF_H_

/* C interface to the phonoprof library.
 *
 * Every function that can fail returns a pp_status.  On failure a message is
 * available from pp_last_error() on the same thread until the next call into
 * the library.  Objects are opaque handles released with their _destroy
 * function; passing NULL to a _destroy function is a no-op. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PP_API __declspec(dllexport)
#else
#define PP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pp_status {
  PP_OK = 0,
  PP_INVALID_ARGUMENT = 1,
  PP_IO_ERROR = 2,
  PP_MALFORMED_TEXTGRID = 10,
  PP_UNSUPPORTED_ENCODING = 11,
  PP_EMPTY_FILE = 12,
  PP_TIER_NOT_FOUND = 13,
  PP_BAD_MAGIC = 20,
  PP_TRUNCATED_FILE = 21,
  PP_DIM_MISMATCH = 22,
  PP_NON_FINITE = 23,
  PP_EMPTY_FRAME_MATRIX = 24,
  PP_INTERVAL_OUT_OF_RANGE = 25,
  PP_OVERLAPPING_CLASSES = 30,
  PP_MISSING_FEATURE = 31,
  PP_UNKNOWN_FEATURE_NAME = 32,
  PP_OUT_OF_RANGE = 33,
  PP_INSUFFICIENT_TOKENS = 40,
  PP_DEGENERATE_DIRECTION = 41,
  PP_ZERO_VARIANCE = 42,
  PP_INELIGIBLE = 43,
  PP_NO_TRANSITIONS = 44,
  PP_NO_INTERIOR_TOKENS = 45,
  PP_INSUFFICIENT_CORNER_TOKENS = 46,
  PP_TOO_FEW_PAIRS = 50,
  PP_CONSTANT_INPUT = 51,
  PP_NEAR_SINGULAR = 52,
  PP_INVALID_P = 53,
  PP_EMPTY_GROUP = 54,
  PP_TOO_FEW_STUDIES = 55,
  PP_DEGENERATE_RHO = 56,
  PP_SINGLE_CLASS = 57,
  PP_CLASS_TOO_SMALL = 58,
  PP_NON_CONVERGENCE = 59,
  PP_OUT_OF_DOMAIN = 60,
  PP_STRATUM_TOO_SMALL = 61,
  PP_SCHEMA_ERROR = 70,
  PP_CONFLICTING_SEVERITY = 71,
  PP_DUPLICATE_SPEAKER = 72,
  PP_NO_CONTROLS_FOR_LANGUAGE = 73,
  PP_INVALID_SPEC = 74,
  PP_INTERNAL_ERROR = 99
} pp_status;

PP_API const char* pp_version(void);
/* CamelCase name of a status, e.g. "TierNotFound". */
PP_API const char* pp_status_name(pp_status status);
/* Message of the last failure on this thread; "" when none. */
PP_API const char* pp_last_error(void);

/* ---- run options ----------------------------------------------------------
 * Integer keys: seed, bootstrap_iters, min_tokens, corpus_min_tokens,
 *   subsample_n, subsample_reps, workers, robustness_variants (0/1)
 * Real keys: min_duration_ms, logistic_l2
 * String keys: format ("csv" or "jsonl") */
typedef struct pp_options pp_options;
PP_API pp_status pp_options_create(pp_options** out);
PP_API void pp_options_destroy(pp_options* options);
PP_API pp_status pp_options_set_int(pp_options* options, const char* key, int64_t value);
PP_API pp_status pp_options_set_real(pp_options* options, const char* key, double value);
PP_API pp_status pp_options_set_string(pp_options* options, const char* key, const char* value);

/* ---- whole-run entry points ---------------------------------------------- */
/* manifest -> out_dir/{profiles.csv, directions.json, run.jsonl} */
PP_API pp_status pp_run_profile(const char* manifest_path, const char* out_dir, const pp_options* options);
/* manifest -> directions JSON */
PP_API pp_status pp_run_directions(const char* manifest_path, const char* out_path, const pp_options* options);
/* profiles.csv -> report tables + run.jsonl */
PP_API pp_status pp_run_analyze(const char* profiles_path, const char* out_dir, const pp_options* options);
/* n TextGrid/FRM1 pairs of one speaker -> PET1 table.  utterance_ids may be
 * NULL (file stems are used); tier and config_path may be NULL or "". */
PP_API pp_status pp_run_tokens(const char* const* textgrid_paths, const char* const* frames_paths,
                               const char* const* utterance_ids, size_t n, const char* speaker_id,
                               const char* tier, const char* config_path, const char* out_path,
                               size_t* n_tokens);

typedef struct pp_synth_spec {
  uint32_t dim;
  size_t speakers_per_level;
  size_t tokens_per_class;
  double schedule[4]; /* separation in sigma units per severity level */
  size_t levels;      /* entries of schedule in use, 1..4 */
  double sigma;
  uint64_t seed;
  size_t corpora;
  size_t corner_tokens;
  size_t utterance_length;
  int emit_frames;
} pp_synth_spec;

/* Defaults: dim 16, 50 speakers/level, 200 tokens/class, schedule
 * (3, 2, 1, 0.5), sigma 1, seed 42, 1 corpus, 20 corner tokens, 12 phones per
 * utterance, no frames. */
PP_API void pp_synth_spec_default(pp_synth_spec* spec);
PP_API pp_status pp_run_synth(const pp_synth_spec* spec, const char* out_dir);

/* ---- manifests and profiles ------------------------------------------------- */
typedef struct pp_manifest pp_manifest;
PP_API pp_status pp_manifest_load(const char* path, pp_manifest** out);
PP_API void pp_manifest_destroy(pp_manifest* manifest);
PP_API size_t pp_manifest_speaker_count(const pp_manifest* manifest);
/* Severity ordinal (0..3) of speaker i in (corpus, speaker_id) order. */
PP_API pp_status pp_manifest_speaker_severity(const pp_manifest* manifest, size_t i, int* severity);

typedef struct pp_profiles pp_profiles;
PP_API pp_status pp_profiles_build(const pp_manifest* manifest, const pp_options* options, pp_profiles** out);
PP_API pp_status pp_profiles_read(const char* path, pp_profiles** out);
PP_API pp_status pp_profiles_write(const pp_profiles* profiles, const char* path);
PP_API void pp_profiles_destroy(pp_profiles* profiles);
PP_API size_t pp_profiles_count(const pp_profiles* profiles);
/* Number of metrics per profile (12) and the name of metric m. */
PP_API size_t pp_metric_count(void);
PP_API const char* pp_metric_name(size_t m);
/* *present is 0 when the metric is absent; *reason then holds why. */
PP_API pp_status pp_profiles_metric(const pp_profiles* profiles, size_t i, size_t m, double* value, int* present,
                                    pp_status* reason);
PP_API const char* pp_profiles_speaker_id(const pp_profiles* profiles, size_t i);

/* ---- formats ------------------------------------------------------------------ */
typedef struct pp_textgrid pp_textgrid;
PP_API pp_status pp_textgrid_parse(const uint8_t* bytes, size_t size, pp_textgrid** out);
PP_API void pp_textgrid_destroy(pp_textgrid* grid);
PP_API size_t pp_textgrid_tier_count(const pp_textgrid* grid);
PP_API const char* pp_textgrid_tier_name(const pp_textgrid* grid, size_t tier);
PP_API size_t pp_textgrid_interval_count(const pp_textgrid* grid, size_t tier);
PP_API pp_status pp_textgrid_interval(const pp_textgrid* grid, size_t tier, size_t i, double* start, double* end,
                                      const char** label);

/* Mean of frames[frame_count x dim] whose centres fall in [start, end), or
 * the frame nearest the midpoint.  out has dim entries. */
PP_API pp_status pp_pool_phone(const float* frames, size_t frame_count, uint32_t dim, double hop, double start,
                               double end, double* out);

/* ---- statistics ------------------------------------------------------------------ */
PP_API pp_status pp_spearman(const double* x, const double* y, size_t n, double* rho, double* p);
PP_API pp_status pp_kendall_tau(const double* x, const double* y, size_t n, double* tau, double* p);
PP_API pp_status pp_partial_spearman(const double* x, const double* y, const double* z, size_t n, double* rho,
                                     double* p);
PP_API pp_status pp_bootstrap_spearman_ci(const double* x, const double* y, size_t n, size_t iterations,
                                          uint64_t seed, double* lower, double* upper);
PP_API pp_status pp_bh_fdr(const double* p, size_t n, double* adjusted);
/* u is min(U_a, U_b); u_a counts pairs with a > b (ties half). */
PP_API pp_status pp_mann_whitney(const double* a, size_t na, const double* b, size_t nb, double* u, double* u_a,
                                 double* p);
PP_API pp_status pp_cliffs_delta(const double* a, size_t na, const double* b, size_t nb, double* delta);

typedef struct pp_meta_result {
  size_t k;
  double pooled_rho;
  double tau2;
  double i2;
  double q;
  double dl_lower, dl_upper, dl_p;
  double hksj_lower, hksj_upper, hksj_p;
  int has_prediction_interval;
  double pi_lower, pi_upper;
} pp_meta_result;

PP_API pp_status pp_dl_meta(const double* rho, const size_t* n, size_t k, pp_meta_result* out);
/* higher_is_positive: 1 when larger scores indicate the positive class. */
PP_API pp_status pp_roc(const double* scores, const uint8_t* labels, size_t n, int higher_is_positive, double* auc,
                        double* threshold, double* sensitivity, double* specificity);
PP_API pp_status pp_normal_quantile(double p, double* out);
PP_API pp_status pp_student_t_quantile(double p, double df, double* out);
PP_API pp_status pp_heron_area(double a, double b, double c, double* area);
PP_API pp_status pp_dprime(const double* pos, size_t n_pos, const double* neg, size_t n_neg, double* d_prime);
/* Severity ordinal from an intelligibility percentage. */
PP_API pp_status pp_map_intelligibility(double pct, int* severity);

#ifdef __cplusplus
}
#endif

#endif  // PHONOPROF_PHONOPROF_H_
