/*
 * rss_sentry — quantized-RSS surveillance bound & estimation toolkit.
 *
 * C API over the C++ core. Handles are opaque; every fallible call returns
 * an rss_status and writes results through out-pointers. On failure, a
 * human-readable message is available from rss_last_error() until the next
 * failing call on the same thread.
 */
#ifndef RSS_SENTRY_H
#define RSS_SENTRY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RSS_API __declspec(dllexport)
#else
#define RSS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes match the CLI exit-code contract. */
typedef enum rss_status {
    RSS_OK = 0,
    RSS_ERR_DOMAIN = 1,  /* invalid parameter values            */
    RSS_ERR_IO = 2,      /* file parse / write failures         */
    RSS_ERR_NUMERIC = 3  /* singular FIM, degenerate likelihood */
} rss_status;

RSS_API const char* rss_version(void);
RSS_API const char* rss_last_error(void);

/* ------------------------------------------------------------------ */
/* Vibration / phasor model                                            */
/* ------------------------------------------------------------------ */

typedef struct rss_vibration_scene {
    double a;            /* unaffected phasor sum amplitude (linear) */
    double beta;         /* affected/unaffected amplitude ratio b/a  */
    double theta_rad;    /* relative phase of affected component     */
    double delta_z_m;    /* peak-to-peak surface displacement        */
    double wavelength_m; /* RF wavelength                            */
} rss_vibration_scene;

RSS_API rss_status rss_wavelength_m(double carrier_hz, double* out_m);
RSS_API rss_status rss_baseline_power_db(const rss_vibration_scene* scene, double* out_db);
RSS_API rss_status rss_delta_p_db(const rss_vibration_scene* scene, double* out_db);
RSS_API rss_status rss_theta_max_rad(double beta, double* out_rad);
RSS_API rss_status rss_delta_p_max_db(const rss_vibration_scene* scene, double* out_db);
RSS_API rss_status rss_expected_delta_p_db(const rss_vibration_scene* scene, double* out_db);

/* ------------------------------------------------------------------ */
/* Signal synthesis and quantization                                   */
/* ------------------------------------------------------------------ */

typedef struct rss_sine_params {
    double amplitude_db;
    double dc_offset_db;
    double frequency_hz;
    double phase_rad;
} rss_sine_params;

typedef struct rss_acquisition {
    double sample_rate_hz;
    uint64_t num_samples;
    double noise_std_db;
    uint64_t rng_seed;
} rss_acquisition;

typedef enum rss_trace_kind {
    RSS_TRACE_CONTINUOUS = 0,
    RSS_TRACE_ONE_BIT = 1,
    RSS_TRACE_UNIFORM = 2
} rss_trace_kind;

typedef struct rss_trace rss_trace; /* opaque */

RSS_API rss_status rss_trace_synthesize(const rss_sine_params* params,
                                        const rss_acquisition* acq, rss_trace** out);
RSS_API rss_status rss_trace_quantize_one_bit(const rss_trace* in, double threshold_db,
                                              rss_trace** out);
RSS_API rss_status rss_trace_quantize_uniform(const rss_trace* in, double step_db,
                                              rss_trace** out);
/* format: "csv-rss" (strict t_s,rss_db header) or "csv-kv" (any two-column
 * time/value header, e.g. t_s,rss_dbm). */
RSS_API rss_status rss_trace_load_csv(const char* path, const char* format, rss_trace** out);
RSS_API rss_status rss_trace_save_csv(const rss_trace* trace, const char* path);

RSS_API size_t rss_trace_size(const rss_trace* trace);
RSS_API rss_trace_kind rss_trace_get_kind(const rss_trace* trace);
RSS_API double rss_trace_sample_rate_hz(const rss_trace* trace);
/* Pointers valid while the trace lives. */
RSS_API const double* rss_trace_values(const rss_trace* trace);
RSS_API const double* rss_trace_times_s(const rss_trace* trace);
RSS_API void rss_trace_free(rss_trace* trace);

/* ------------------------------------------------------------------ */
/* Cramer-Rao bounds                                                   */
/* ------------------------------------------------------------------ */

typedef struct rss_crb_result {
    double crb_a_db2;          /* variance bound on A (dB^2)            */
    double crb_b_db2;
    double crb_omega_rad2_s2;  /* variance bound on omega ((rad/s)^2)   */
    double crb_phi_rad2;
    double std_a_db;
    double std_f_hz;           /* sqrt(crb_omega) / (2 pi)              */
    double condition;          /* FIM condition number                  */
} rss_crb_result;

typedef struct rss_avg_options {
    int grid_phases;  /* <= 0: default 32                          */
    int grid_offsets; /* <= 0: default 33                          */
    int average_fim;  /* 0: mean of per-cell CRBs (default); 1: mean FIM */
    int threads;      /* <= 0: all cores (RSS_SENTRY_THREADS env)  */
} rss_avg_options;

typedef struct rss_avg_crb {
    double crb_a_db2;
    double crb_omega_rad2_s2;
    double std_a_db;
    double std_f_hz;
    double failed_fraction; /* singular cells excluded from the mean */
    int flagged;            /* failed_fraction > 5%                  */
} rss_avg_crb;

RSS_API rss_status rss_pmf_one_bit(int q, uint64_t k, const rss_sine_params* params,
                                   const rss_acquisition* acq, double* out);
RSS_API rss_status rss_score_one_bit(int q, uint64_t k, const rss_sine_params* params,
                                     const rss_acquisition* acq, double out[4]);
/* Row-major 4x4 over (A, B, omega, phi). */
RSS_API rss_status rss_fim(const rss_sine_params* params, const rss_acquisition* acq,
                           double out[16]);
RSS_API rss_status rss_crb_point(const rss_sine_params* params, const rss_acquisition* acq,
                                 rss_crb_result* out);
RSS_API rss_status rss_crb_averaged(const rss_sine_params* params, const rss_acquisition* acq,
                                    double step_db, const rss_avg_options* opts,
                                    rss_avg_crb* out);
RSS_API rss_status rss_unquantized_crb(const rss_sine_params* params, const rss_acquisition* acq,
                                       rss_crb_result* out);

/* ------------------------------------------------------------------ */
/* Bound sweeps                                                        */
/* ------------------------------------------------------------------ */

/* Fills out_* arrays of n_sigma entries; failed rows carry NaN and set
 * out_flagged. */
RSS_API rss_status rss_sweep_noise(const rss_sine_params* params, const rss_acquisition* acq,
                                   double step_db, const double* sigma_grid, size_t n_sigma,
                                   const rss_avg_options* opts, double* out_std_a_db,
                                   double* out_std_f_hz, double* out_failed_fraction,
                                   int* out_flagged);

typedef struct rss_optimal_noise_result {
    double sigma_opt_db;   /* argmin of averaged CRB(omega)  */
    double sigma_opt_a_db; /* argmin of averaged CRB(A)      */
    double ratio;          /* sigma_opt_a / sigma_opt        */
    double min_std_f_hz;
    double min_std_a_db;
    int non_unimodal;      /* grid argmin, no refinement     */
} rss_optimal_noise_result;

/* sigma_grid may be NULL/0 for the default 60-point [step/100, 3*step]. */
RSS_API rss_status rss_optimal_noise(double step_db, const rss_sine_params* params,
                                     const rss_acquisition* acq, const rss_avg_options* opts,
                                     const double* sigma_grid, size_t n_sigma,
                                     rss_optimal_noise_result* out);

RSS_API rss_status rss_sweep_step(const rss_sine_params* params, const rss_acquisition* acq,
                                  const double* delta_grid, size_t n_delta,
                                  const rss_avg_options* opts, double* out_sigma_opt_db,
                                  double* out_min_std_a_db, double* out_min_std_f_hz,
                                  int* out_flagged);

typedef enum rss_nyquist_policy {
    RSS_NYQUIST_REJECT = 0, /* error when f >= fs/2              */
    RSS_NYQUIST_SCALE = 1   /* scale f with fs / max(fs_grid)    */
} rss_nyquist_policy;

RSS_API rss_status rss_sweep_rate(const rss_sine_params* params, double sigma_db, double step_db,
                                  const double* fs_grid, size_t n_fs, double t_obs_s,
                                  rss_nyquist_policy policy, const rss_avg_options* opts,
                                  double* out_f_hz, uint64_t* out_n, double* out_std_a_db,
                                  double* out_std_f_hz, int* out_flagged);

/* out arrays are n_fs * n_delta, row-major over fs then delta. */
RSS_API rss_status rss_sweep_contour(const rss_sine_params* params, const double* fs_grid,
                                     size_t n_fs, const double* delta_grid, size_t n_delta,
                                     double t_obs_s, rss_nyquist_policy policy,
                                     const rss_avg_options* opts, double* out_min_std_a_db,
                                     double* out_min_std_f_hz, int* out_flagged);

/* ------------------------------------------------------------------ */
/* Estimators                                                          */
/* ------------------------------------------------------------------ */

typedef enum rss_method { RSS_METHOD_MLE = 0, RSS_METHOD_PERIODOGRAM = 1 } rss_method;

typedef struct rss_estimate_result {
    rss_sine_params estimate;
    double log_likelihood;
    int converged;
    int iterations;
    rss_method method;
} rss_estimate_result;

RSS_API rss_status rss_log_likelihood(const rss_trace* trace, const rss_sine_params* params,
                                      double noise_std_db, double* out);
/* band_hi_hz <= 0 means fs/2. noise_std_db is the assumed pre-quantization
 * sigma (ignored by the periodogram). */
RSS_API rss_status rss_estimate(const rss_trace* trace, double band_lo_hz, double band_hi_hz,
                                double noise_std_db, rss_method method,
                                rss_estimate_result* out);

/* ------------------------------------------------------------------ */
/* Monte-Carlo harness                                                 */
/* ------------------------------------------------------------------ */

typedef enum rss_quantizer_mode { RSS_QUANT_ONE_BIT = 0, RSS_QUANT_UNIFORM = 1 } rss_quantizer_mode;

typedef struct rss_mc_config {
    uint64_t trials;
    rss_sine_params truth; /* phase/dc ignored; drawn per trial */
    rss_acquisition acq;   /* noise_std overridden per sigma point */
    rss_quantizer_mode quantizer_mode;
    double step_db;
    double threshold_db;
    uint64_t seed;
    rss_method method;
    double band_lo_hz; /* 0,0 = full band */
    double band_hi_hz;
    int threads;
} rss_mc_config;

typedef struct rss_mc_row {
    double sigma_db;
    double rmse_f_hz;
    double rmse_a_db;
    double bias_f_hz;
    double bias_a_db;
    uint64_t trials_used;
    uint64_t dropouts;
} rss_mc_row;

RSS_API rss_status rss_mc_rmse(const rss_mc_config* config, const double* sigma_grid,
                               size_t n_sigma, rss_mc_row* out_rows);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RSS_SENTRY_H */
