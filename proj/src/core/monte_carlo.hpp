#pragma once

#include <cstdint>
#include <vector>

#include "estimators.hpp"
#include "trace.hpp"

namespace rss_sentry {

// Monte-Carlo RMSE study: per trial, draw phi ~ U[0,2pi) and DC offset
// B ~ U[-step/2, step/2), synthesize, quantize, estimate. Deterministic for
// a given seed; trials are independent (per-trial RNG streams) and may run
// in parallel with accumulation fixed by trial index.
struct McConfig {
    std::uint64_t trials = 100;
    SineParams truth;          // amplitude, frequency used; phase/dc drawn per trial
    AcquisitionSpec acq;       // noise_std overridden by each sigma grid point
    QuantizerSpec quantizer;
    std::vector<double> sigma_grid;
    std::uint64_t seed = 0;
    EstimationMethod method = EstimationMethod::Mle;
    FrequencyBand band;        // lo == hi == 0 means full (0, fs/2)
    int threads = 0;

    void validate() const;
};

struct McRow {
    double sigma_db = 0.0;
    double rmse_f_hz = 0.0;
    double rmse_a_db = 0.0;
    double bias_f_hz = 0.0;
    double bias_a_db = 0.0;
    std::uint64_t trials_used = 0;
    std::uint64_t dropouts = 0;
};

std::vector<McRow> monte_carlo_rmse(const McConfig& config);

}  // namespace rss_sentry
