#ifndef EESBI_H
#define EESBI_H

/* C interface to the simulation-based-inference toolkit. All functions
 * return an ee_status; anything but EE_OK leaves a human-readable message
 * in ee_last_error() for the calling thread. Status values double as
 * process exit codes for the bundled command-line tool. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ee_status {
  EE_OK = 0,      /* success */
  EE_USAGE = 1,   /* bad arguments: null pointers, out-of-range indices, ... */
  EE_CONFIG = 2,  /* rejected configuration or mismatched dataset/checkpoint */
  EE_RUNTIME = 3  /* I/O failures, corrupt files, numerical breakdown */
} ee_status;

/* Message describing the calling thread's most recent failure; the empty
 * string after a successful call. The pointer stays valid until this thread's
 * next call into the library. */
const char* ee_last_error(void);

const char* ee_version(void);

/* Opaque, immutable-after-setup run configuration. */
typedef struct ee_config ee_config;

ee_status ee_config_parse(const char* text, ee_config** out);
ee_status ee_config_load(const char* path, ee_config** out);
void ee_config_free(ee_config* cfg);

/* Command-line style overrides, applied on top of the parsed file. Each one
 * appends a comment to the echoed config text so outputs record the
 * effective settings. */
ee_status ee_config_set_seed(ee_config* cfg, uint64_t seed);
ee_status ee_config_set_threads(ee_config* cfg, uint32_t threads);
ee_status ee_config_set_loss(ee_config* cfg, const char* loss); /* sym | phi_y | y_phi */
ee_status ee_config_set_intra_weight(ee_config* cfg, double weight);

uint64_t ee_config_param_dim(const ee_config* cfg);
uint64_t ee_config_obs_dim(const ee_config* cfg);
uint32_t ee_config_sample_count(const ee_config* cfg);

/* Draws `count` parameters from the prior, simulates each, and writes the
 * dataset plus its process manifest to out_path. */
ee_status ee_simulate(const ee_config* cfg, uint64_t count, const char* out_path);

typedef struct ee_train_summary {
  uint32_t best_epoch;
  double best_score;
  double final_train_loss;
} ee_train_summary;

/* Trains on data_path against val_path and writes the best checkpoint to
 * ckpt_path, with a CSV epoch log at "<ckpt_path>.log.csv". summary may be
 * null. */
ee_status ee_train(const ee_config* cfg, const char* data_path, const char* val_path,
                   const char* ckpt_path, ee_train_summary* summary);

typedef struct ee_infer_summary {
  uint64_t samples;
  uint64_t candidates;
  double normalizer;
  double envelope_b;
  double acceptance_rate;
  uint64_t envelope_violations;
} ee_infer_summary;

/* Posterior samples for observation `index` of the dataset at obs_path,
 * written as CSV to out_path. sample_count 0 uses the config's inference
 * sample count. prior_override_text, when non-null and nonempty, must parse
 * as a config whose prior nests inside the training prior; samples are drawn
 * under it. summary may be null. */
ee_status ee_infer(const ee_config* cfg, const char* ckpt_path, const char* obs_path,
                   uint64_t index, uint32_t sample_count, const char* out_path,
                   const char* prior_override_text, ee_infer_summary* summary);

/* Scores the checkpoint on the dataset at test_path. metrics is a
 * comma-separated list drawn from: l1, r2, mmd, cv, redundancy. Writes the
 * per-instance CSV to out_path (skipped when null or empty). When
 * summary_out is non-null it receives one "name p25=... median=... p75=..."
 * line per report; free it with ee_string_free. */
ee_status ee_eval(const ee_config* cfg, const char* ckpt_path, const char* test_path,
                  const char* metrics, const char* out_path, char** summary_out);

void ee_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* EESBI_H */
