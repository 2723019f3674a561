#include "math_special.hpp"

#include <cmath>
#include <limits>

namespace rss_sentry {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrtPi = 1.77245385090551602730;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)
constexpr double kLogSqrt2Pi = 0.91893853320467274178;   // log(sqrt(2*pi))

// erfcx on x >= 0. exp(x^2)*erfc(x) is accurate while erfc keeps full
// precision; past x = 20 use the asymptotic expansion
// erfcx(x) = 1/(x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6) + ...).
double erfcx_nonneg(double x) {
    if (x < 20.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    const double ix2 = 1.0 / (x * x);
    double sum = 1.0;
    double term = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= -(2.0 * k - 1.0) * 0.5 * ix2;
        sum += term;
    }
    return sum / (x * kSqrtPi);
}

}  // namespace

double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x >= 0.0) return erfcx_nonneg(x);
    // erfcx(-|x|) = 2 exp(x^2) - erfcx(|x|); overflows past x^2 ~ 709.
    const double x2 = x * x;
    if (x2 > 708.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x2) - erfcx_nonneg(-x);
}

double log_erfcx(double x) {
    if (x >= 0.0) return std::log(erfcx_nonneg(x));
    const double x2 = x * x;
    if (x2 > 700.0) {
        // erfcx(|x|) e^{-x^2} is negligible against 2.
        return x2 + kLn2;
    }
    return x2 + std::log(2.0 - erfcx_nonneg(-x) * std::exp(-x2));
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

double log_normal_cdf(double z) {
    if (z > -1.0) {
        return std::log(normal_cdf(z));
    }
    // log Phi(z) = -z^2/2 - log 2 + log erfcx(-z/sqrt2), -z/sqrt2 > 0 here.
    return -0.5 * z * z - kLn2 + std::log(erfcx_nonneg(-z / kSqrt2));
}

double mills_ratio(double z) {
    if (z >= 0.0) {
        const double half_z2 = 0.5 * z * z;
        if (half_z2 > 700.0) {
            // Phi(z) ~ 1; ratio collapses to phi(z).
            return std::exp(-half_z2 - kLogSqrt2Pi);
        }
        // erfcx(-z/sqrt2) stays in normal double range here.
        return kSqrt2OverPi / (2.0 * std::exp(half_z2) - erfcx_nonneg(z / kSqrt2));
    }
    return kSqrt2OverPi / erfcx_nonneg(-z / kSqrt2);
}

double one_bit_fisher_weight(double u) {
    const double au = std::fabs(u);
    const double z = au / kSqrt2;
    if (au <= 26.0) {
        return 1.0 / (erfcx_nonneg(z) * (2.0 * std::exp(z * z) - erfcx_nonneg(z)));
    }
    // log w = -(z^2 + ln 2) - log erfcx(z); underflows gracefully to 0.
    return std::exp(-(z * z + kLn2) - std::log(erfcx_nonneg(z)));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }

    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the exact CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace rss_sentry
