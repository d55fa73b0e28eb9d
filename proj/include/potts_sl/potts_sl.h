/* Copyright 2026 The potts-sl Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef POTTS_SL_POTTS_SL_H_
#define POTTS_SL_POTTS_SL_H_

/* C interface to the potts_sl library. Every function returns a psl_status;
 * on failure psl_last_error() describes the problem for the calling thread.
 * Objects are opaque and owned by the caller once returned. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PSL_API __declspec(dllexport)
#else
#define PSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes. */
typedef enum {
  PSL_OK = 0,
  PSL_USAGE_ERROR = 1,
  PSL_DATA_ERROR = 2,
  PSL_NUMERIC_ERROR = 3
} psl_status;

typedef struct psl_image psl_image;
typedef struct psl_labels psl_labels;
typedef struct psl_field psl_field;
typedef struct psl_config psl_config;
typedef struct psl_report psl_report;
typedef struct psl_train_result psl_train_result;

PSL_API const char* psl_last_error(void);
PSL_API const char* psl_version(void);

/* Images (binary PPM). */
PSL_API psl_status psl_image_read(const char* path, psl_image** out);
PSL_API psl_status psl_image_write(const psl_image* image, const char* path);
PSL_API psl_status psl_image_dims(const psl_image* image, int* height, int* width);
PSL_API void psl_image_free(psl_image* image);

/* Label maps (binary PGM, 1..K or 255). With classes == 0 the class count is
 * taken as max(2, largest label). */
PSL_API psl_status psl_labels_read(const char* path, int classes, psl_labels** out);
PSL_API psl_status psl_labels_write(const psl_labels* labels, const char* path);
PSL_API psl_status psl_labels_dims(const psl_labels* labels, int* height, int* width,
                                   int* classes);
PSL_API void psl_labels_free(psl_labels* labels);

/* Probability fields (PFLD). */
PSL_API psl_status psl_field_read(const char* path, psl_field** out);
PSL_API psl_status psl_field_write(const psl_field* field, const char* path);
PSL_API psl_status psl_field_dims(const psl_field* field, int* height, int* width,
                                  int* classes);
/* Copies the pixel-major values into buf, which must hold h * w * K doubles. */
PSL_API psl_status psl_field_values(const psl_field* field, double* buf, size_t len);
PSL_API psl_status psl_field_decode(const psl_field* field, psl_labels** out);
/* Writes the default-palette visualization as a PPM. */
PSL_API psl_status psl_field_write_visualization(const psl_field* field, const char* path);
PSL_API void psl_field_free(psl_field* field);

/* Run configuration. */
PSL_API psl_status psl_config_default(psl_config** out);
PSL_API psl_status psl_config_read(const char* path, psl_config** out);
PSL_API psl_status psl_config_parse(const char* text, psl_config** out);
PSL_API psl_status psl_config_seed(const psl_config* config, uint64_t* seed);
PSL_API psl_status psl_config_set_seed(psl_config* config, uint64_t seed);
PSL_API void psl_config_free(psl_config* config);

/* Reports: a sequence of (name, value) rows. Names may be empty. */
PSL_API size_t psl_report_length(const psl_report* report);
PSL_API double psl_report_value(const psl_report* report, size_t i);
PSL_API const char* psl_report_name(const psl_report* report, size_t i);
PSL_API void psl_report_free(psl_report* report);

/* Pseudo-label solve with sigma fixed. `report` gets one row per step
 * (steps + 1 rows, value = objective). Either output may be NULL. */
PSL_API psl_status psl_solve(const psl_image* image, const psl_labels* scribbles,
                             const psl_field* sigma, const psl_config* config,
                             psl_field** labels_out, psl_report** report);

/* Exact quadratic oracle using the config's eta and lambda. */
PSL_API psl_status psl_random_walker(const psl_image* image, const psl_labels* scribbles,
                                     const psl_field* sigma, const psl_config* config,
                                     psl_field** labels_out);

/* Scribble pretraining followed by alternation, seeded by the config. */
PSL_API psl_status psl_train(const psl_image* image, const psl_labels* scribbles,
                             const psl_config* config, psl_train_result** out);
PSL_API psl_status psl_train_result_sigma(const psl_train_result* result, psl_field** out);
PSL_API psl_status psl_train_result_labels(const psl_train_result* result, psl_field** out);
/* Joint loss after each round. */
PSL_API psl_status psl_train_result_trace(const psl_train_result* result, psl_report** out);
/* Pretraining warnings, one per row (value 0). */
PSL_API psl_status psl_train_result_warnings(const psl_train_result* result,
                                             psl_report** out);
PSL_API void psl_train_result_free(psl_train_result* result);

/* Mean IoU of `pred` against `gt` (255 in gt ignored). */
PSL_API psl_status psl_miou(const psl_labels* pred, const psl_labels* gt, int classes,
                            double* out);

/* Finite-difference gradient suite. `kind` is NULL or "all" for everything,
 * otherwise "potts:<name>" or "xent:<name>". Rows are (suite name, max
 * relative error). */
PSL_API psl_status psl_gradcheck(const char* kind, int pairs, uint64_t seed,
                                 psl_report** out);

/* Label-corruption benchmark on the synthetic blobs dataset. Rows are named
 * "<eta>,<kind>" with value = test accuracy in [0, 1]. */
PSL_API psl_status psl_corruption_bench(uint64_t seed, psl_report** out);

#ifdef __cplusplus
}
#endif

#endif /* POTTS_SL_POTTS_SL_H_ */
