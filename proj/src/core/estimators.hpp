#pragma once

#include <cstdint>

#include "trace.hpp"

namespace rss_sentry {

enum class EstimationMethod { Mle, Periodogram };

struct FrequencyBand {
    double lo_hz = 0.0;
    double hi_hz = 0.0;
};

struct EstimationResult {
    SineParams estimate;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;
    EstimationMethod method = EstimationMethod::Mle;
};

// Total one-bit log-likelihood sum_k log Phi(q_k u_k) for the given
// parameters; trace must be one-bit, sigma comes from `acq`.
double log_likelihood(const RssTrace& trace, const SineParams& params, const AcquisitionSpec& acq);

// Maximum-likelihood fit of (A, B, omega, phi) from a one-bit trace:
// frequency grid with spacing fs/(4N) over the band, concave per-frequency
// ascent over (a, b, B), then simplex refinement of all four parameters.
// Uniform-quantized traces are binarized at their dominant level boundary.
// The returned dc_offset is absolute (threshold folded back in).
EstimationResult mle_fit(const RssTrace& trace, const FrequencyBand& band, double noise_std_db);

// Mean-removed, >=8x zero-padded magnitude spectrum; peak in band with
// quadratic bin interpolation. Amplitude from peak magnitude * 2/N.
EstimationResult periodogram_estimate(const RssTrace& trace, const FrequencyBand& band);

}  // namespace rss_sentry
