#include "vibration.hpp"

#include <cmath>

#include "constants.hpp"
#include "errors.hpp"

namespace rss_sentry {

namespace {

// The paper restricts the closed forms to beta strictly inside (0,1); the
// divergence at beta -> 1 is cut off just below it.
constexpr double kBetaSup = 1.0 - 1e-9;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be finite");
    }
}

}  // namespace

double wavelength_m(double carrier_hz) {
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
        throw DomainError("carrier frequency must be positive and finite");
    }
    return kSpeedOfLightMps / carrier_hz;
}

void VibrationScene::validate() const {
    require_finite(a, "a");
    require_finite(beta, "beta");
    require_finite(theta_rad, "theta");
    require_finite(delta_z_m, "delta_z");
    require_finite(wavelength_m, "wavelength");
    if (!(a > 0.0)) throw DomainError("a must be > 0");
    if (beta < 0.0) throw DomainError("beta must be >= 0");
    if (delta_z_m < 0.0) throw DomainError("delta_z must be >= 0");
    if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be > 0");
}

double baseline_power_db(const VibrationScene& scene) {
    scene.validate();
    const double b = scene.beta * scene.a;
    const double c2 = scene.a * scene.a + b * b + 2.0 * scene.a * b * std::cos(scene.theta_rad);
    if (!(c2 > 0.0)) {
        throw DomainError("phasor sum cancels exactly; power undefined in dB");
    }
    return 10.0 * std::log10(c2);
}

double delta_p_db(const VibrationScene& scene) {
    scene.validate();
    const double beta = scene.beta;
    const double denom = 1.0 + beta * beta + 2.0 * beta * std::cos(scene.theta_rad);
    if (!(denom > 0.0)) {
        throw DomainError("degenerate phasor geometry: 1 + beta^2 + 2 beta cos(theta) <= 0");
    }
    const double prefactor = 80.0 * kPi * scene.delta_z_m / (std::log(10.0) * scene.wavelength_m);
    return prefactor * beta * std::sin(scene.theta_rad) / denom;
}

double theta_max_rad(double beta) {
    if (!std::isfinite(beta) || beta < 0.0 || beta >= kBetaSup) {
        throw DomainError("theta_max requires 0 <= beta < 1");
    }
    return std::acos(-2.0 * beta / (1.0 + beta * beta));
}

double delta_p_max_db(const VibrationScene& scene) {
    scene.validate();
    const double beta = scene.beta;
    if (!(beta > 0.0) || beta >= kBetaSup) {
        throw DomainError("delta_p_max requires 0 < beta < 1");
    }
    const double prefactor = 80.0 * kPi * scene.delta_z_m / (std::log(10.0) * scene.wavelength_m);
    return prefactor * beta / (1.0 - beta * beta);
}

double expected_delta_p_db(const VibrationScene& scene) {
    scene.validate();
    const double beta = scene.beta;
    if (beta >= kBetaSup) {
        throw DomainError("expected_delta_p requires beta < 1");
    }
    if (beta == 0.0) return 0.0;
    return (8.0 * scene.delta_z_m / scene.wavelength_m) *
           10.0 * std::log10((1.0 + beta) / (1.0 - beta));
}

}  // namespace rss_sentry
