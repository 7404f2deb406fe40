#ifndef CONTAGION_H_
#define CONTAGION_H_

/*
 * C interface to the contagion library: SIR transmission models fitted to
 * daily online-interest series by MCMC.
 *
 * Every function returns CTG_OK (0) on success or a negative ctg_status. After a
 * failure, ctg_last_error() returns a message for the calling thread.
 *
 * Objects are opaque handles created by *_load / *_parse / ctg_fit /
 * ctg_simulate and released with the matching *_destroy. Destroying NULL is a
 * no-op.
 *
 * Short strings are copied into a caller buffer with an in/out length: on
 * entry *len is the capacity, on exit it is the size needed including the NUL.
 * Passing out == NULL (or too small a buffer) returns
 * CTG_ERROR_INSUFFICIENT_BUFFER with *len set. The batch commands return their
 * report text as a library-allocated string released with ctg_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CONTAGION_BUILDING)
#    define CONTAGION_API __declspec(dllexport)
#  else
#    define CONTAGION_API __declspec(dllimport)
#  endif
#else
#  define CONTAGION_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum ctg_status {
  CTG_OK = 0,
  CTG_ERROR_INPUT = -1,               /* malformed or invalid input data / options */
  CTG_ERROR_NUMERICAL = -2,           /* integration or sampler failure */
  CTG_ERROR_IO = -3,                  /* missing or unwritable files */
  CTG_ERROR_NULL_POINTER = -4,
  CTG_ERROR_INSUFFICIENT_BUFFER = -5,
  CTG_ERROR_OUT_OF_RANGE = -6,
  CTG_ERROR_UNKNOWN = -100
};

CONTAGION_API const char* ctg_version(void);
CONTAGION_API const char* ctg_status_string(int status);
CONTAGION_API const char* ctg_last_error(void);

/* Silences library warnings on stderr (e.g. failed likelihood integrations). */
CONTAGION_API void ctg_set_warnings(int enabled);

CONTAGION_API void ctg_string_free(char* str);

typedef struct ctg_params {
  double beta;   /* transmission rate, per day */
  double gamma;  /* recovery rate, per day */
  double r;      /* interest per percentage point newly infected per day */
  double i0;     /* initial infectious proportion */
} ctg_params;

typedef struct ctg_integrator {
  double rtol;
  double atol;
} ctg_integrator;

/* rtol 1e-6, atol 1e-8 */
CONTAGION_API void ctg_integrator_default(ctg_integrator* opts);

/* ---- interest series ---------------------------------------------------- */

typedef struct ctg_series_struct* ctg_series_t;

/* Parse a `date,value` CSV with a header line. The stored series is gap-filled. */
CONTAGION_API int ctg_series_load(ctg_series_t* series, const char* path);
CONTAGION_API int ctg_series_parse(ctg_series_t* series, const char* csv, size_t csv_len, const char* label);
CONTAGION_API int ctg_series_destroy(ctg_series_t series);

/* Number of days after gap filling. */
CONTAGION_API int ctg_series_length(ctg_series_t series, size_t* n);

/* Observation window: values from the first positive day. *n is capacity in, count out. */
CONTAGION_API int ctg_series_window(ctg_series_t series, double* values, size_t* n);

/* First observation date as YYYY-MM-DD. */
CONTAGION_API int ctg_series_start_date(ctg_series_t series, char* out, size_t* len);

/* ---- deterministic model ------------------------------------------------ */

typedef struct ctg_trajectory_struct* ctg_trajectory_t;

/* Integrates from S=1-i0, I=i0, R=0, C=i0 over days 0..horizon. */
CONTAGION_API int ctg_simulate(ctg_trajectory_t* traj, const ctg_params* params, int horizon,
                               const ctg_integrator* opts /* nullable */);
CONTAGION_API int ctg_trajectory_destroy(ctg_trajectory_t traj);
CONTAGION_API int ctg_trajectory_horizon(ctg_trajectory_t traj, int* horizon);
CONTAGION_API int ctg_trajectory_state(ctg_trajectory_t traj, int day, double* s, double* i, double* rec, double* c);
/* Daily incidence for days 1..horizon. *n is capacity in, count out. */
CONTAGION_API int ctg_trajectory_incidence(ctg_trajectory_t traj, double* out, size_t* n);
CONTAGION_API int ctg_trajectory_write_csv(ctg_trajectory_t traj, const char* path);

CONTAGION_API int ctg_final_size(double r0, double s0, double* z);
CONTAGION_API int ctg_extinction_probability(double r0, double* p);
CONTAGION_API int ctg_r_squared(const double* observed, const double* predicted, size_t n, double* r2);
CONTAGION_API int ctg_log_posterior(ctg_series_t series, const ctg_params* params, double prior_mean,
                                    double prior_var, double* value);

/* ---- posterior ------------------------------------------------------------ */

typedef struct ctg_mcmc_config {
  uint64_t burn_in;
  uint64_t samples;
  uint64_t thin;
  uint64_t seed;
  double step_sizes[4]; /* initial proposal sds: log beta, log gamma, log r, logit i0 */
  int adapt;
  uint64_t adapt_interval;
  double target_acceptance;
} ctg_mcmc_config;

/* 10000 burn-in, 40000 samples, thin 1, seed 0, adaptation on. */
CONTAGION_API void ctg_mcmc_config_default(ctg_mcmc_config* cfg);

typedef struct ctg_posterior_struct* ctg_posterior_t;

CONTAGION_API int ctg_fit(ctg_posterior_t* posterior, ctg_series_t series, double prior_mean, double prior_var,
                          const ctg_mcmc_config* cfg, size_t n_chains);
CONTAGION_API int ctg_posterior_load(ctg_posterior_t* posterior, const char* path);
CONTAGION_API int ctg_posterior_save(ctg_posterior_t posterior, const char* path);
CONTAGION_API int ctg_posterior_destroy(ctg_posterior_t posterior);
CONTAGION_API int ctg_posterior_size(ctg_posterior_t posterior, size_t* n);
CONTAGION_API int ctg_posterior_draw(ctg_posterior_t posterior, size_t index, ctg_params* params, double* log_posterior);
CONTAGION_API int ctg_posterior_acceptance_rate(ctg_posterior_t posterior, double* rate);
CONTAGION_API int ctg_posterior_map(ctg_posterior_t posterior, ctg_params* params);

typedef struct ctg_interval {
  double median;
  double lower95;
  double upper95;
} ctg_interval;

typedef struct ctg_summary {
  ctg_interval r0;
  ctg_interval generation_time;
  ctg_interval r;
  ctg_interval i0;
  ctg_interval beta;
  ctg_interval gamma;
  size_t n_draws;
} ctg_summary;

CONTAGION_API int ctg_posterior_summary(ctg_posterior_t posterior, ctg_summary* summary);

typedef struct ctg_peak_timing {
  double mean_days;
  double sd_days;
  size_t n_draws;
  size_t flagged;
} ctg_peak_timing;

CONTAGION_API int ctg_posterior_peak_timing(ctg_posterior_t posterior, size_t n_draws, double i0, uint64_t seed,
                                            int horizon,
                                            ctg_peak_timing* out);

/* In-sample and (when out_sample is non-NULL) out-of-sample R^2 of the
 * noise-free model at params. */
CONTAGION_API int ctg_validate(const ctg_params* params, ctg_series_t in_sample, ctg_series_t out_sample,
                               double* r2_in, double* r2_out);

/* ---- batch commands --------------------------------------------------------- */

typedef struct ctg_fit_options {
  const char* input;
  const char* out_sample; /* nullable */
  const char* out_dir;
  double prior_mean;
  double prior_var;
  ctg_mcmc_config mcmc;
  size_t chains;
  size_t ensemble;
  double peak_i0;
  int peak_horizon;
  ctg_integrator integrator;
  int emit_svg;
} ctg_fit_options;

CONTAGION_API void ctg_fit_options_default(ctg_fit_options* opts);
/* Writes posterior.csv, envelope.csv and fit_report.json into out_dir. */
CONTAGION_API int ctg_run_fit(const ctg_fit_options* opts);

typedef struct ctg_simulate_options {
  const ctg_params* params; /* exactly one of params / posterior */
  const char* posterior;
  int horizon;
  double i0;
  size_t ensemble;
  uint64_t seed;
  const char* out_dir;
  ctg_integrator integrator;
} ctg_simulate_options;

CONTAGION_API void ctg_simulate_options_default(ctg_simulate_options* opts);
/* Writes trajectory.csv or ensemble.csv plus peak_timing.json; returns the JSON. */
CONTAGION_API int ctg_run_simulate(const ctg_simulate_options* opts, char** json /* nullable */);

typedef struct ctg_validate_options {
  const char* posterior;
  const char* input;
  const char* out_sample; /* nullable */
  const char* out_dir;    /* nullable: validation.json only written when set */
  ctg_integrator integrator;
} ctg_validate_options;

CONTAGION_API void ctg_validate_options_default(ctg_validate_options* opts);
CONTAGION_API int ctg_run_validate(const ctg_validate_options* opts, char** json /* nullable */);

typedef struct ctg_report_options {
  const char* run_dir;
  int emit_svg;
  size_t bins;
} ctg_report_options;

CONTAGION_API void ctg_report_options_default(ctg_report_options* opts);
/* Writes summary.txt (and SVG plots when emit_svg) into run_dir; returns the text. */
CONTAGION_API int ctg_run_report(const ctg_report_options* opts, char** text /* nullable */);

#ifdef __cplusplus
}
#endif

#endif /* CONTAGION_H_ */
