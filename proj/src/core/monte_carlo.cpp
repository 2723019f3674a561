#include "monte_carlo.hpp"

#include <cmath>
#include <limits>

#include "constants.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace rss_sentry {

void McConfig::validate() const {
    if (trials < 1) throw DomainError("need at least 1 trial");
    truth.validate_against_rate(acq.sample_rate_hz);
    acq.validate();
    quantizer.validate();
    if (sigma_grid.empty()) throw DomainError("sigma grid is empty");
    for (double s : sigma_grid) {
        if (!(s > 0.0)) throw DomainError("sigma grid must be positive");
    }
    if (band.lo_hz != 0.0 || band.hi_hz != 0.0) {
        if (!(band.lo_hz >= 0.0 && band.hi_hz > band.lo_hz)) {
            throw DomainError("invalid frequency band");
        }
    }
}

std::vector<McRow> monte_carlo_rmse(const McConfig& config) {
    config.validate();

    FrequencyBand band = config.band;
    if (band.lo_hz == 0.0 && band.hi_hz == 0.0) {
        band = {0.0, 0.5 * config.acq.sample_rate_hz};
    }

    struct TrialOutcome {
        double err_f = 0.0;
        double err_a = 0.0;
        bool ok = false;
    };

    const double half_step = 0.5 * config.quantizer.step_db;
    std::vector<McRow> rows;
    rows.reserve(config.sigma_grid.size());

    for (std::size_t si = 0; si < config.sigma_grid.size(); ++si) {
        const double sigma = config.sigma_grid[si];
        std::vector<TrialOutcome> outcomes(config.trials);

        parallel_for(config.trials, config.threads, [&](std::size_t trial) {
            // Stream index couples (sigma point, trial) so rows are
            // independent and the whole table reproduces from one seed.
            Rng rng = Rng::for_trial(config.seed,
                                     si * config.trials + trial);
            const double phase = rng.uniform(0.0, kTwoPi);
            const double offset = rng.uniform(-half_step, half_step);

            SineParams truth = config.truth;
            truth.phase_rad = phase;
            truth.dc_offset_db =
                (config.quantizer.mode == QuantizerMode::OneBit)
                    ? config.quantizer.threshold_db + offset
                    : offset;

            AcquisitionSpec acq = config.acq;
            acq.noise_std_db = sigma;
            acq.rng_seed = rng.next_u64();

            try {
                const RssTrace continuous = synthesize(truth, acq);
                const RssTrace quantized =
                    (config.quantizer.mode == QuantizerMode::OneBit)
                        ? quantize_one_bit(continuous, config.quantizer)
                        : quantize_uniform(continuous, config.quantizer);

                EstimationResult est;
                if (config.method == EstimationMethod::Mle) {
                    est = mle_fit(quantized, band, sigma);
                } else {
                    est = periodogram_estimate(quantized, band);
                }
                outcomes[trial].err_f = est.estimate.frequency_hz - truth.frequency_hz;
                outcomes[trial].err_a = est.estimate.amplitude_db - truth.amplitude_db;
                outcomes[trial].ok = true;
            } catch (const NumericError&) {
                outcomes[trial].ok = false;  // counted dropout
            }
        });

        McRow row;
        row.sigma_db = sigma;
        double se_f = 0.0, se_a = 0.0, sum_f = 0.0, sum_a = 0.0;
        for (const auto& oc : outcomes) {
            if (!oc.ok) {
                ++row.dropouts;
                continue;
            }
            se_f += oc.err_f * oc.err_f;
            se_a += oc.err_a * oc.err_a;
            sum_f += oc.err_f;
            sum_a += oc.err_a;
            ++row.trials_used;
        }
        if (row.trials_used > 0) {
            const double n = static_cast<double>(row.trials_used);
            row.rmse_f_hz = std::sqrt(se_f / n);
            row.rmse_a_db = std::sqrt(se_a / n);
            row.bias_f_hz = sum_f / n;
            row.bias_a_db = sum_a / n;
        } else {
            row.rmse_f_hz = std::numeric_limits<double>::quiet_NaN();
            row.rmse_a_db = std::numeric_limits<double>::quiet_NaN();
            row.bias_f_hz = std::numeric_limits<double>::quiet_NaN();
            row.bias_a_db = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace rss_sentry
