#pragma once

namespace rss_sentry {

// Phasor-sum geometry of a multipath channel with one vibrating reflector.
// The unaffected paths sum to amplitude a; the affected path has amplitude
// b = beta * a and relative phase theta. A surface vibrating with
// peak-to-peak displacement delta_z modulates theta by 4*pi*delta_z/lambda.
struct VibrationScene {
    double a = 1.0;             // unaffected phasor sum amplitude (linear)
    double beta = 0.0;          // relative affected amplitude b/a
    double theta_rad = 0.0;     // relative phase of affected component
    double delta_z_m = 0.0;     // peak-to-peak displacement
    double wavelength_m = 0.0;  // RF wavelength

    void validate() const;  // throws DomainError on bad fields
};

// Baseline received power 10 log10(a^2 + b^2 + 2ab cos theta), dB.
double baseline_power_db(const VibrationScene& scene);

// First-order power change per vibration cycle (signed, dB). Proportional
// to delta_z; callers wanting magnitude take the absolute value.
double delta_p_db(const VibrationScene& scene);

// Phase maximizing the power change: arccos(-2 beta / (1 + beta^2)).
double theta_max_rad(double beta);

// Supremum of delta_p_db over theta, requires 0 < beta < 1.
double delta_p_max_db(const VibrationScene& scene);

// Expectation of |delta P| over theta ~ U[0, 2pi), requires beta < 1.
double expected_delta_p_db(const VibrationScene& scene);

}  // namespace rss_sentry
