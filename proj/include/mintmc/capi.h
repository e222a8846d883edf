/* Copyright (c) the mintmc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the mintmc shared library.
 *
 * Experiments are driven by a JSON config (see the README for the schema)
 * through an opaque handle. Functions return MINTMC_OK on success; on
 * failure they return a status code and mintmc_last_error() describes the
 * problem (the message is thread-local and valid until the next failing call
 * on the same thread).
 */

#ifndef MINTMC_CAPI_H
#define MINTMC_CAPI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mintmc_status {
  MINTMC_OK = 0,
  MINTMC_ERR_RUNTIME = 1,   /* sampler / numeric / io failure */
  MINTMC_ERR_CONFIG = 2     /* invalid config, arguments or data files */
} mintmc_status;

const char* mintmc_version(void);

/* Last error message on this thread; empty string if none. */
const char* mintmc_last_error(void);

typedef struct mintmc_experiment mintmc_experiment;

/* Constructors return NULL on failure (see mintmc_last_error). */
mintmc_experiment* mintmc_experiment_from_json(const char* config_json);
mintmc_experiment* mintmc_experiment_from_file(const char* config_path);

/* Applies a config override before running, e.g.
 * ("seed", "42") or ("sampler.algorithm", "\"mint\""). The value is JSON. */
mintmc_status mintmc_experiment_override(mintmc_experiment* exp,
                                         const char* dotted_key,
                                         const char* json_value);

/* Runs the sampler and computes diagnostics; writes output files when the
 * config carries a non-empty output_dir. */
mintmc_status mintmc_experiment_run(mintmc_experiment* exp);

/* Fully resolved config (defaults expanded), as JSON. Owned by the handle. */
const char* mintmc_experiment_config(mintmc_experiment* exp);

/* Diagnostics summary of a finished run, as JSON. Owned by the handle. */
const char* mintmc_experiment_diagnostics(mintmc_experiment* exp);

/* Post-burn-in sample access (chain 0 for MINTEE runs). */
int64_t mintmc_experiment_sample_count(const mintmc_experiment* exp);
int32_t mintmc_experiment_dim(const mintmc_experiment* exp);

/* Copies samples row-major into out (capacity in doubles); returns the
 * number of doubles written, or -1 on error. */
int64_t mintmc_experiment_copy_samples(const mintmc_experiment* exp,
                                       double* out, int64_t capacity);

/* Writes samples.csv, diagnostics.json and per-diagnostic CSVs into dir. */
mintmc_status mintmc_experiment_write_outputs(mintmc_experiment* exp,
                                              const char* dir);

void mintmc_experiment_free(mintmc_experiment* exp);

/* Generates the configured synthetic dataset and writes it as CSV. */
mintmc_status mintmc_generate_data(const char* config_json,
                                   const char* out_csv_path);

/* Recomputes diagnostics.json inside a stored run directory. */
mintmc_status mintmc_diagnose(const char* run_dir);

/* Runs the t-statistic normality study from the config's
 * diagnostics.normality block and writes the report JSON to out_path. */
mintmc_status mintmc_normality(const char* config_json, const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MINTMC_CAPI_H */
