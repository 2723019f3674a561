#pragma once

namespace rss_sentry {

// Scaled complementary error function, erfcx(x) = exp(x^2) * erfc(x).
// Finite for every finite x <= ~26.6; for more negative x the exact value
// overflows double range, so callers in that regime must use log_erfcx.
double erfcx(double x);

// log(erfcx(x)), valid for all finite x (including x << 0 where
// erfcx(x) ~ 2 exp(x^2) would overflow).
double log_erfcx(double x);

// Standard normal CDF and log-CDF, stable in both tails.
double normal_cdf(double z);
double log_normal_cdf(double z);

// Inverse Mills ratio phi(z) / Phi(z); grows like -z for z -> -inf,
// decays like phi(z) for z -> +inf. Stable everywhere.
double mills_ratio(double z);

// One-bit Fisher weight from the quantized-sinusoid information matrix:
//   w(u) = exp(-u^2) / (1 - erf^2(u / sqrt(2))) = 1 / (erfcx(z) erfcx(-z)),
// with z = u / sqrt(2). The quotient form is 0/0 in doubles for |u| >~ 6;
// above |u| = 26 we switch to log-domain evaluation with
// log erfcx(-z) ~ z^2 + log 2. Decays to 0 for large |u|, never NaN.
double one_bit_fisher_weight(double u);

// Inverse standard normal CDF (Acklam's rational approximation with one
// Halley refinement step; relative error < 1e-13 on (0,1)).
double normal_quantile(double p);

}  // namespace rss_sentry
