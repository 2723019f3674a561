#include "rss_sentry.h"

#include <cstring>
#include <new>
#include <string>

#include "../core/bounds.hpp"
#include "../core/constants.hpp"
#include "../core/errors.hpp"
#include "../core/estimators.hpp"
#include "../core/monte_carlo.hpp"
#include "../core/sweeps.hpp"
#include "../core/trace.hpp"
#include "../core/trace_io.hpp"
#include "../core/vibration.hpp"

using namespace rss_sentry;

struct rss_trace {
    RssTrace impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) {
    g_last_error = what ? what : "unknown error";
}

// Translate core exceptions into the status contract.
template <typename Fn>
rss_status guarded(Fn&& fn) {
    try {
        fn();
        return RSS_OK;
    } catch (const DomainError& e) {
        set_error(e.what());
        return RSS_ERR_DOMAIN;
    } catch (const IoError& e) {
        set_error(e.what());
        return RSS_ERR_IO;
    } catch (const NumericError& e) {
        set_error(e.what());
        return RSS_ERR_NUMERIC;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return RSS_ERR_NUMERIC;
    } catch (const std::exception& e) {
        set_error(e.what());
        return RSS_ERR_NUMERIC;
    }
}

rss_status require(bool cond, const char* message) {
    if (cond) return RSS_OK;
    set_error(message);
    return RSS_ERR_DOMAIN;
}

VibrationScene to_scene(const rss_vibration_scene& s) {
    VibrationScene scene;
    scene.a = s.a;
    scene.beta = s.beta;
    scene.theta_rad = s.theta_rad;
    scene.delta_z_m = s.delta_z_m;
    scene.wavelength_m = s.wavelength_m;
    return scene;
}

SineParams to_params(const rss_sine_params& p) {
    SineParams out;
    out.amplitude_db = p.amplitude_db;
    out.dc_offset_db = p.dc_offset_db;
    out.frequency_hz = p.frequency_hz;
    out.phase_rad = p.phase_rad;
    return out;
}

rss_sine_params from_params(const SineParams& p) {
    return {p.amplitude_db, p.dc_offset_db, p.frequency_hz, p.phase_rad};
}

AcquisitionSpec to_acq(const rss_acquisition& a) {
    AcquisitionSpec out;
    out.sample_rate_hz = a.sample_rate_hz;
    out.num_samples = a.num_samples;
    out.noise_std_db = a.noise_std_db;
    out.rng_seed = a.rng_seed;
    return out;
}

AveragingGrid to_grid(const rss_avg_options* opts) {
    AveragingGrid grid;
    if (opts) {
        if (opts->grid_phases > 0) grid.phases = opts->grid_phases;
        if (opts->grid_offsets > 0) grid.offsets = opts->grid_offsets;
        grid.average_fim = opts->average_fim != 0;
        grid.threads = opts->threads;
    }
    return grid;
}

void fill_crb(const CrbResult& r, rss_crb_result* out) {
    out->crb_a_db2 = r.crb_a_db2;
    out->crb_b_db2 = r.crb_b_db2;
    out->crb_omega_rad2_s2 = r.crb_omega_rad2_s2;
    out->crb_phi_rad2 = r.crb_phi_rad2;
    out->std_a_db = r.std_a_db;
    out->std_f_hz = r.std_f_hz;
    out->condition = r.condition;
}

}  // namespace

extern "C" {

const char* rss_version(void) { return "0.1.0"; }

const char* rss_last_error(void) { return g_last_error.c_str(); }

/* ---------------- vibration ---------------- */

rss_status rss_wavelength_m(double carrier_hz, double* out_m) {
    if (auto st = require(out_m != nullptr, "out pointer is null")) return st;
    return guarded([&] { *out_m = wavelength_m(carrier_hz); });
}

rss_status rss_baseline_power_db(const rss_vibration_scene* scene, double* out_db) {
    if (auto st = require(scene && out_db, "null argument")) return st;
    return guarded([&] { *out_db = baseline_power_db(to_scene(*scene)); });
}

rss_status rss_delta_p_db(const rss_vibration_scene* scene, double* out_db) {
    if (auto st = require(scene && out_db, "null argument")) return st;
    return guarded([&] { *out_db = delta_p_db(to_scene(*scene)); });
}

rss_status rss_theta_max_rad(double beta, double* out_rad) {
    if (auto st = require(out_rad != nullptr, "out pointer is null")) return st;
    return guarded([&] { *out_rad = theta_max_rad(beta); });
}

rss_status rss_delta_p_max_db(const rss_vibration_scene* scene, double* out_db) {
    if (auto st = require(scene && out_db, "null argument")) return st;
    return guarded([&] { *out_db = delta_p_max_db(to_scene(*scene)); });
}

rss_status rss_expected_delta_p_db(const rss_vibration_scene* scene, double* out_db) {
    if (auto st = require(scene && out_db, "null argument")) return st;
    return guarded([&] { *out_db = expected_delta_p_db(to_scene(*scene)); });
}

/* ---------------- traces ---------------- */

rss_status rss_trace_synthesize(const rss_sine_params* params, const rss_acquisition* acq,
                                rss_trace** out) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] {
        auto trace = new rss_trace{synthesize(to_params(*params), to_acq(*acq))};
        *out = trace;
    });
}

rss_status rss_trace_quantize_one_bit(const rss_trace* in, double threshold_db, rss_trace** out) {
    if (auto st = require(in && out, "null argument")) return st;
    return guarded([&] {
        QuantizerSpec q;
        q.mode = QuantizerMode::OneBit;
        q.threshold_db = threshold_db;
        *out = new rss_trace{quantize_one_bit(in->impl, q)};
    });
}

rss_status rss_trace_quantize_uniform(const rss_trace* in, double step_db, rss_trace** out) {
    if (auto st = require(in && out, "null argument")) return st;
    return guarded([&] {
        QuantizerSpec q;
        q.mode = QuantizerMode::Uniform;
        q.step_db = step_db;
        *out = new rss_trace{quantize_uniform(in->impl, q)};
    });
}

rss_status rss_trace_load_csv(const char* path, const char* format, rss_trace** out) {
    if (auto st = require(path && format && out, "null argument")) return st;
    return guarded([&] {
        *out = new rss_trace{ingest_trace(path, parse_trace_format(format))};
    });
}

rss_status rss_trace_save_csv(const rss_trace* trace, const char* path) {
    if (auto st = require(trace && path, "null argument")) return st;
    return guarded([&] { export_trace(trace->impl, path); });
}

size_t rss_trace_size(const rss_trace* trace) { return trace ? trace->impl.size() : 0; }

rss_trace_kind rss_trace_get_kind(const rss_trace* trace) {
    if (!trace) return RSS_TRACE_CONTINUOUS;
    switch (trace->impl.kind) {
        case TraceKind::OneBit: return RSS_TRACE_ONE_BIT;
        case TraceKind::UniformQuantized: return RSS_TRACE_UNIFORM;
        default: return RSS_TRACE_CONTINUOUS;
    }
}

double rss_trace_sample_rate_hz(const rss_trace* trace) {
    return trace ? trace->impl.sample_rate_hz : 0.0;
}

const double* rss_trace_values(const rss_trace* trace) {
    return trace ? trace->impl.values.data() : nullptr;
}

const double* rss_trace_times_s(const rss_trace* trace) {
    return trace ? trace->impl.times_s.data() : nullptr;
}

void rss_trace_free(rss_trace* trace) { delete trace; }

/* ---------------- bounds ---------------- */

rss_status rss_pmf_one_bit(int q, uint64_t k, const rss_sine_params* params,
                           const rss_acquisition* acq, double* out) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] { *out = pmf_one_bit(q, k, to_params(*params), to_acq(*acq)); });
}

rss_status rss_score_one_bit(int q, uint64_t k, const rss_sine_params* params,
                             const rss_acquisition* acq, double out[4]) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] {
        const auto s = score_one_bit(q, k, to_params(*params), to_acq(*acq));
        for (int i = 0; i < 4; ++i) out[i] = s[i];
    });
}

rss_status rss_fim(const rss_sine_params* params, const rss_acquisition* acq, double out[16]) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] {
        const FisherMatrix m = fim(to_params(*params), to_acq(*acq));
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) out[i * 4 + j] = m.entries[i][j];
        }
    });
}

rss_status rss_crb_point(const rss_sine_params* params, const rss_acquisition* acq,
                         rss_crb_result* out) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] { fill_crb(crb_point(to_params(*params), to_acq(*acq)), out); });
}

rss_status rss_crb_averaged(const rss_sine_params* params, const rss_acquisition* acq,
                            double step_db, const rss_avg_options* opts, rss_avg_crb* out) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] {
        const AveragedCrb r = crb_averaged(to_params(*params), to_acq(*acq), step_db, to_grid(opts));
        out->crb_a_db2 = r.crb_a_db2;
        out->crb_omega_rad2_s2 = r.crb_omega_rad2_s2;
        out->std_a_db = r.std_a_db;
        out->std_f_hz = r.std_f_hz;
        out->failed_fraction = r.failed_fraction;
        out->flagged = r.flagged ? 1 : 0;
    });
}

rss_status rss_unquantized_crb(const rss_sine_params* params, const rss_acquisition* acq,
                               rss_crb_result* out) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] { fill_crb(unquantized_crb(to_params(*params), to_acq(*acq)), out); });
}

/* ---------------- sweeps ---------------- */

rss_status rss_sweep_noise(const rss_sine_params* params, const rss_acquisition* acq,
                           double step_db, const double* sigma_grid, size_t n_sigma,
                           const rss_avg_options* opts, double* out_std_a_db,
                           double* out_std_f_hz, double* out_failed_fraction, int* out_flagged) {
    if (auto st = require(params && acq && sigma_grid && n_sigma > 0 && out_std_a_db &&
                              out_std_f_hz,
                          "null argument")) {
        return st;
    }
    return guarded([&] {
        const std::vector<double> grid(sigma_grid, sigma_grid + n_sigma);
        const auto rows = sweep_noise(to_params(*params), to_acq(*acq), step_db, grid, to_grid(opts));
        for (size_t i = 0; i < rows.size(); ++i) {
            out_std_a_db[i] = rows[i].std_a_db;
            out_std_f_hz[i] = rows[i].std_f_hz;
            if (out_failed_fraction) out_failed_fraction[i] = rows[i].failed_fraction;
            if (out_flagged) out_flagged[i] = rows[i].flagged ? 1 : 0;
        }
    });
}

rss_status rss_optimal_noise(double step_db, const rss_sine_params* params,
                             const rss_acquisition* acq, const rss_avg_options* opts,
                             const double* sigma_grid, size_t n_sigma,
                             rss_optimal_noise_result* out) {
    if (auto st = require(params && acq && out, "null argument")) return st;
    return guarded([&] {
        std::vector<double> grid;
        if (sigma_grid && n_sigma > 0) grid.assign(sigma_grid, sigma_grid + n_sigma);
        const OptimalNoiseResult r =
            optimal_noise(step_db, to_params(*params), to_acq(*acq), to_grid(opts), grid);
        out->sigma_opt_db = r.sigma_opt_db;
        out->sigma_opt_a_db = r.sigma_opt_a_db;
        out->ratio = r.ratio;
        out->min_std_f_hz = r.min_std_f_hz;
        out->min_std_a_db = r.min_std_a_db;
        out->non_unimodal = r.non_unimodal ? 1 : 0;
    });
}

rss_status rss_sweep_step(const rss_sine_params* params, const rss_acquisition* acq,
                          const double* delta_grid, size_t n_delta, const rss_avg_options* opts,
                          double* out_sigma_opt_db, double* out_min_std_a_db,
                          double* out_min_std_f_hz, int* out_flagged) {
    if (auto st = require(params && acq && delta_grid && n_delta > 0 && out_min_std_a_db &&
                              out_min_std_f_hz,
                          "null argument")) {
        return st;
    }
    return guarded([&] {
        const std::vector<double> grid(delta_grid, delta_grid + n_delta);
        const auto rows = sweep_step_size(to_params(*params), to_acq(*acq), grid, to_grid(opts));
        for (size_t i = 0; i < rows.size(); ++i) {
            if (out_sigma_opt_db) out_sigma_opt_db[i] = rows[i].sigma_opt_db;
            out_min_std_a_db[i] = rows[i].min_std_a_db;
            out_min_std_f_hz[i] = rows[i].min_std_f_hz;
            if (out_flagged) out_flagged[i] = rows[i].flagged ? 1 : 0;
        }
    });
}

rss_status rss_sweep_rate(const rss_sine_params* params, double sigma_db, double step_db,
                          const double* fs_grid, size_t n_fs, double t_obs_s,
                          rss_nyquist_policy policy, const rss_avg_options* opts,
                          double* out_f_hz, uint64_t* out_n, double* out_std_a_db,
                          double* out_std_f_hz, int* out_flagged) {
    if (auto st = require(params && fs_grid && n_fs > 0 && out_std_a_db && out_std_f_hz,
                          "null argument")) {
        return st;
    }
    return guarded([&] {
        const std::vector<double> grid(fs_grid, fs_grid + n_fs);
        const auto rows = sweep_sample_rate(
            to_params(*params), sigma_db, step_db, grid, t_obs_s,
            policy == RSS_NYQUIST_SCALE ? NyquistPolicy::Scale : NyquistPolicy::Reject,
            to_grid(opts));
        for (size_t i = 0; i < rows.size(); ++i) {
            if (out_f_hz) out_f_hz[i] = rows[i].f_hz;
            if (out_n) out_n[i] = rows[i].num_samples;
            out_std_a_db[i] = rows[i].std_a_db;
            out_std_f_hz[i] = rows[i].std_f_hz;
            if (out_flagged) out_flagged[i] = rows[i].flagged ? 1 : 0;
        }
    });
}

rss_status rss_sweep_contour(const rss_sine_params* params, const double* fs_grid, size_t n_fs,
                             const double* delta_grid, size_t n_delta, double t_obs_s,
                             rss_nyquist_policy policy, const rss_avg_options* opts,
                             double* out_min_std_a_db, double* out_min_std_f_hz,
                             int* out_flagged) {
    if (auto st = require(params && fs_grid && n_fs > 0 && delta_grid && n_delta > 0 &&
                              out_min_std_a_db && out_min_std_f_hz,
                          "null argument")) {
        return st;
    }
    return guarded([&] {
        const std::vector<double> fs(fs_grid, fs_grid + n_fs);
        const std::vector<double> deltas(delta_grid, delta_grid + n_delta);
        const auto cells = sweep_contour(
            to_params(*params), fs, deltas, t_obs_s,
            policy == RSS_NYQUIST_SCALE ? NyquistPolicy::Scale : NyquistPolicy::Reject,
            to_grid(opts));
        for (size_t i = 0; i < cells.size(); ++i) {
            out_min_std_a_db[i] = cells[i].min_std_a_db;
            out_min_std_f_hz[i] = cells[i].min_std_f_hz;
            if (out_flagged) out_flagged[i] = cells[i].flagged ? 1 : 0;
        }
    });
}

/* ---------------- estimators ---------------- */

rss_status rss_log_likelihood(const rss_trace* trace, const rss_sine_params* params,
                              double noise_std_db, double* out) {
    if (auto st = require(trace && params && out, "null argument")) return st;
    return guarded([&] {
        AcquisitionSpec acq;
        acq.sample_rate_hz = trace->impl.sample_rate_hz;
        acq.num_samples = trace->impl.size();
        acq.noise_std_db = noise_std_db;
        *out = log_likelihood(trace->impl, to_params(*params), acq);
    });
}

rss_status rss_estimate(const rss_trace* trace, double band_lo_hz, double band_hi_hz,
                        double noise_std_db, rss_method method, rss_estimate_result* out) {
    if (auto st = require(trace && out, "null argument")) return st;
    return guarded([&] {
        FrequencyBand band{band_lo_hz, band_hi_hz};
        if (band.hi_hz <= 0.0) band.hi_hz = 0.5 * trace->impl.sample_rate_hz;
        EstimationResult r;
        if (method == RSS_METHOD_MLE) {
            r = mle_fit(trace->impl, band, noise_std_db);
        } else {
            r = periodogram_estimate(trace->impl, band);
        }
        out->estimate = from_params(r.estimate);
        out->log_likelihood = r.log_likelihood;
        out->converged = r.converged ? 1 : 0;
        out->iterations = r.iterations;
        out->method = method;
    });
}

/* ---------------- Monte Carlo ---------------- */

rss_status rss_mc_rmse(const rss_mc_config* config, const double* sigma_grid, size_t n_sigma,
                       rss_mc_row* out_rows) {
    if (auto st = require(config && sigma_grid && n_sigma > 0 && out_rows, "null argument")) {
        return st;
    }
    return guarded([&] {
        McConfig mc;
        mc.trials = config->trials;
        mc.truth = to_params(config->truth);
        mc.acq = to_acq(config->acq);
        mc.quantizer.mode = config->quantizer_mode == RSS_QUANT_UNIFORM ? QuantizerMode::Uniform
                                                                        : QuantizerMode::OneBit;
        mc.quantizer.step_db = config->step_db;
        mc.quantizer.threshold_db = config->threshold_db;
        mc.sigma_grid.assign(sigma_grid, sigma_grid + n_sigma);
        mc.seed = config->seed;
        mc.method = config->method == RSS_METHOD_PERIODOGRAM ? EstimationMethod::Periodogram
                                                             : EstimationMethod::Mle;
        mc.band = {config->band_lo_hz, config->band_hi_hz};
        mc.threads = config->threads;

        const auto rows = monte_carlo_rmse(mc);
        for (size_t i = 0; i < rows.size(); ++i) {
            out_rows[i].sigma_db = rows[i].sigma_db;
            out_rows[i].rmse_f_hz = rows[i].rmse_f_hz;
            out_rows[i].rmse_a_db = rows[i].rmse_a_db;
            out_rows[i].bias_f_hz = rows[i].bias_f_hz;
            out_rows[i].bias_a_db = rows[i].bias_a_db;
            out_rows[i].trials_used = rows[i].trials_used;
            out_rows[i].dropouts = rows[i].dropouts;
        }
    });
}

} /* extern "C" */
