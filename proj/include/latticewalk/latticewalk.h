#ifndef LATTICEWALK_LATTICEWALK_H
#define LATTICEWALK_LATTICEWALK_H

#include <stddef.h>
#include <stdint.h>

#if defined(LATTICEWALK_BUILDING)
#define LW_API __attribute__((visibility("default")))
#else
#define LW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns an lw_status. On failure a description is
 * available from lw_last_error() on the same thread until the next call. */
typedef enum lw_status {
  LW_OK = 0,
  LW_INVALID_ARGUMENT = 1,
  LW_DIMENSION_MISMATCH = 2,
  LW_CONFIG_ERROR = 3,
  LW_IO_ERROR = 4,
  LW_NUMERICAL_ERROR = 5,
  LW_DIVERGED = 6,
  LW_CHECK_FAILED = 7,
  LW_INTERNAL_ERROR = 8
} lw_status;

typedef enum lw_sampler {
  LW_SAMPLER_SGLD = 0,
  LW_SAMPLER_SGLRW = 1,
  LW_SAMPLER_CLIPPED_SGLD = 2
} lw_sampler;

typedef enum lw_schedule_mode {
  LW_SCHEDULE_DECAYING = 0,
  LW_SCHEDULE_FIXED = 1
} lw_schedule_mode;

typedef enum lw_retain {
  LW_RETAIN_FINAL_ONLY = 0,
  LW_RETAIN_ALL_POST_BURNIN = 1
} lw_retain;

typedef struct lw_model lw_model;
typedef struct lw_config lw_config;
typedef struct lw_run lw_run;

typedef struct lw_chain_options {
  size_t n_chains;
  size_t n_iters;
  size_t burn_in;
  uint64_t master_seed;
  lw_retain retain;
  size_t threads; /* 0 = hardware concurrency */
} lw_chain_options;

LW_API const char* lw_version(void);
LW_API const char* lw_last_error(void);
LW_API const char* lw_status_string(lw_status status);

/* ---- models ---- */

/* design is row-major n x d. */
LW_API lw_status lw_model_linreg_create(const double* design, const double* targets, size_t n, size_t d,
                                        double noise_variance, double prior_precision, lw_model** out);
LW_API lw_status lw_model_linreg_synthetic(size_t n, size_t d, double noise_variance, double prior_precision,
                                           uint64_t seed, lw_model** out);
/* labels must be 0 or 1. */
LW_API lw_status lw_model_logreg_create(const double* features, const double* labels, size_t n, size_t d,
                                        double prior_precision, lw_model** out);
LW_API lw_status lw_model_logreg_synthetic(size_t n, size_t d, double class_separation, double prior_precision,
                                           uint64_t seed, lw_model** out);
LW_API lw_status lw_model_load_linreg(const char* path, double noise_variance, double prior_precision,
                                      lw_model** out);
LW_API void lw_model_destroy(lw_model* model);

LW_API size_t lw_model_dim(const lw_model* model);
LW_API size_t lw_model_num_data(const lw_model* model);
LW_API lw_status lw_model_potential(const lw_model* model, const double* theta, size_t d, double* out);
/* out = grad U(theta) = -(grad log prior + sum_i grad log p(y_i | theta)) */
LW_API lw_status lw_model_full_gradient(const lw_model* model, const double* theta, size_t d, double* out);
LW_API lw_status lw_model_per_datum_gradient(const lw_model* model, const double* theta, size_t d, size_t index,
                                             double* out);
/* Minibatch estimate over the given indices (may repeat, any order). */
LW_API lw_status lw_model_minibatch_gradient(const lw_model* model, const double* theta, size_t d,
                                             const size_t* indices, size_t batch_size, double* out);
/* Linear-regression models only. mean has d entries, covariance d*d row-major. */
LW_API lw_status lw_linreg_posterior(const lw_model* model, double* mean, double* covariance);

/* ---- step primitives ---- */

LW_API lw_status lw_schedule_step(double base_step, double decay_exponent, lw_schedule_mode mode, uint64_t t,
                                  double* out);
LW_API lw_status lw_lrw_transition_prob(double step, double grad, double* p_plus, double* p_minus);

/* ---- chains ---- */

LW_API lw_status lw_run_chains(const lw_model* model, lw_sampler sampler, size_t batch_size, double base_step,
                               double decay_exponent, lw_schedule_mode mode, const lw_chain_options* options,
                               lw_run** out);
LW_API void lw_run_destroy(lw_run* run);
LW_API size_t lw_run_num_chains(const lw_run* run);
LW_API size_t lw_run_dim(const lw_run* run);
LW_API size_t lw_run_diverged_count(const lw_run* run);
LW_API int lw_run_chain_diverged(const lw_run* run, size_t chain);
LW_API size_t lw_run_chain_num_samples(const lw_run* run, size_t chain);
/* Copies chain samples, row-major num_samples x dim. */
LW_API lw_status lw_run_chain_samples(const lw_run* run, size_t chain, double* out, size_t capacity);
/* Pooled retained samples of non-diverged chains. */
LW_API size_t lw_run_pooled_count(const lw_run* run);
LW_API lw_status lw_run_pooled_samples(const lw_run* run, double* out, size_t capacity);

/* ---- diagnostics ---- */

/* KL(N(m1,S1) || N(m2,S2)); covariances row-major d*d. */
LW_API lw_status lw_gaussian_kl(const double* m1, const double* s1, const double* m2, const double* s2, size_t d,
                                double* out);
LW_API lw_status lw_gaussian_fit(const double* samples, size_t n, size_t d, double* mean, double* covariance);
LW_API double lw_clip_constant_closed_form(void);
LW_API lw_status lw_clip_constant_estimate(size_t n_samples, uint64_t seed, double* estimate, double* std_error);

/* ---- experiment configs ---- */

LW_API lw_status lw_config_load(const char* path, lw_config** out);
LW_API lw_status lw_config_parse(const char* text, lw_config** out);
LW_API void lw_config_destroy(lw_config* config);
LW_API const char* lw_config_experiment(const lw_config* config);
LW_API const char* lw_config_output(const lw_config* config);
LW_API lw_status lw_config_set_output(lw_config* config, const char* path);
/* Replaces the seed list with a single seed. */
LW_API lw_status lw_config_set_seed(lw_config* config, uint64_t seed);
LW_API lw_status lw_config_set_threads(lw_config* config, size_t threads);
LW_API lw_status lw_config_set_record_runtime(lw_config* config, int enabled);

/* Runs the experiment, writing CSV to csv_path (NULL or "-" = stdout) and
 * progress to stderr. rows may be NULL. Returns LW_CHECK_FAILED when a
 * self-checking experiment ran but one of its assertions did not hold. */
LW_API lw_status lw_experiment_run(const lw_config* config, const char* csv_path, size_t* rows);

#ifdef __cplusplus
}
#endif

#endif
