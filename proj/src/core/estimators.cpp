#include "estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "math_special.hpp"

namespace rss_sentry {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// ---------------------------------------------------------------------------
// Fast inverse Mills ratio r(t) = phi(t)/Phi(t) and r'(t) = -r (t + r).
// Cubic Hermite table on |t| <= 12, asymptotics outside. Used only inside
// the iterative ascent; final likelihoods go through the exact path.
// ---------------------------------------------------------------------------
struct MillsTable {
    static constexpr int kHalf = 384;  // 12 / (1/32)
    static constexpr double kStep = 1.0 / 32.0;
    std::array<double, 2 * kHalf + 1> r;
    std::array<double, 2 * kHalf + 1> dr;

    MillsTable() {
        for (int i = 0; i <= 2 * kHalf; ++i) {
            const double t = (i - kHalf) * kStep;
            const double v = mills_ratio(t);
            r[i] = v;
            dr[i] = -v * (t + v);
        }
    }
};

void fast_mills_pair(double t, double& r_out, double& rp_out) {
    static const MillsTable table;
    if (t > 12.0) {
        r_out = std::exp(-0.5 * t * t - kLogSqrt2Pi);
        rp_out = -r_out * (t + r_out);
        return;
    }
    if (t < -12.0) {
        const double x = -t;
        const double ix2 = 1.0 / (x * x);
        const double m = (1.0 - ix2 * (1.0 - 3.0 * ix2 * (1.0 - 5.0 * ix2)));
        r_out = x / m;
        rp_out = -r_out * (t + r_out);
        return;
    }
    const double pos = (t + 12.0) * 32.0;
    int idx = static_cast<int>(pos);
    if (idx >= 2 * MillsTable::kHalf) idx = 2 * MillsTable::kHalf - 1;
    const double s = pos - idx;
    const double h = MillsTable::kStep;
    const double y0 = table.r[idx], y1 = table.r[idx + 1];
    const double d0 = table.dr[idx] * h, d1 = table.dr[idx + 1] * h;
    const double s2 = s * s, s3 = s2 * s;
    r_out = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 +
            (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1;
    rp_out = -r_out * (t + r_out);
}

// ---------------------------------------------------------------------------
// Binarization of quantized traces.
// ---------------------------------------------------------------------------
struct BinaryTrace {
    std::vector<double> q;  // +/-1
    double threshold_db = 0.0;
};

BinaryTrace binarize(const RssTrace& trace) {
    if (trace.size() == 0) throw DomainError("empty trace");
    BinaryTrace out;

    if (trace.kind == TraceKind::OneBit) {
        out.q = trace.values;
        out.threshold_db = trace.one_bit_threshold_db;
        for (double v : out.q) {
            if (v != 1.0 && v != -1.0) throw DomainError("one-bit trace has values outside {-1,+1}");
        }
    } else if (trace.kind == TraceKind::UniformQuantized) {
        // Pick the boundary between the two most occupied adjacent levels.
        std::map<double, std::size_t> levels;
        for (double v : trace.values) ++levels[v];
        if (levels.size() < 2) {
            throw UnidentifiableError("uniform-quantized trace occupies a single level");
        }
        double best_boundary = 0.0;
        std::size_t best_count = 0;
        for (auto it = levels.begin(); std::next(it) != levels.end(); ++it) {
            const auto nx = std::next(it);
            const std::size_t count = it->second + nx->second;
            if (count > best_count) {
                best_count = count;
                best_boundary = 0.5 * (it->first + nx->first);
            }
        }
        out.threshold_db = best_boundary;
        out.q.resize(trace.size());
        for (std::size_t k = 0; k < trace.size(); ++k) {
            out.q[k] = trace.values[k] >= best_boundary ? 1.0 : -1.0;
        }
    } else {
        throw DomainError("MLE expects a quantized trace; quantize it first");
    }

    bool all_same = true;
    for (double v : out.q) {
        if (v != out.q.front()) { all_same = false; break; }
    }
    if (all_same) throw UnidentifiableError("all-constant one-bit trace carries no sine information");
    return out;
}

// ---------------------------------------------------------------------------
// Per-frequency concave ascent over (a, b, B) with (x ~ a cos + b sin + B).
// ---------------------------------------------------------------------------
struct AscentState {
    double a = 0.0, b = 0.0, dc = 0.0;
    double log_like = -std::numeric_limits<double>::infinity();
};

class FrequencyAscent {
public:
    FrequencyAscent(const std::vector<double>& q, double sigma, double fs)
        : q_(q), n_(q.size()), sigma_(sigma), fs_(fs) {
        c_.resize(n_);
        s_.resize(n_);
        u_.resize(n_);
    }

    void set_frequency(double f_hz) {
        const double step = kTwoPi * f_hz / fs_;
        const double cw = std::cos(step), sw = std::sin(step);
        double c = 1.0, s = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            c_[k] = c;
            s_[k] = s;
            const double cn = c * cw - s * sw;
            s = s * cw + c * sw;
            c = cn;
        }
    }

    // One Newton step on each of a, b, dc; returns largest parameter move.
    double sweep(AscentState& st) {
        refresh_u(st);
        double max_step = 0.0;
        max_step = std::max(max_step, coordinate_step(st.a, c_.data()));
        max_step = std::max(max_step, coordinate_step(st.b, s_.data()));
        max_step = std::max(max_step, coordinate_step(st.dc, nullptr));
        return max_step;
    }

    // Exact log-likelihood at the current state.
    double exact_log_likelihood(const AscentState& st) {
        double ll = 0.0;
        const double inv_sigma = 1.0 / sigma_;
        for (std::size_t k = 0; k < n_; ++k) {
            const double u = (st.a * c_[k] + st.b * s_[k] + st.dc) * inv_sigma;
            ll += log_normal_cdf(q_[k] * u);
        }
        return ll;
    }

private:
    void refresh_u(const AscentState& st) {
        const double inv_sigma = 1.0 / sigma_;
        for (std::size_t k = 0; k < n_; ++k) {
            u_[k] = (st.a * c_[k] + st.b * s_[k] + st.dc) * inv_sigma;
        }
    }

    // basis == nullptr means the constant coordinate (dc).
    double coordinate_step(double& coord, const double* basis) {
        const double inv_sigma = 1.0 / sigma_;
        double g = 0.0, h = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            const double t = q_[k] * u_[k];
            double r, rp;
            fast_mills_pair(t, r, rp);
            const double bk = basis ? basis[k] : 1.0;
            g += q_[k] * bk * r;
            h += bk * bk * rp;
        }
        g *= inv_sigma;
        h *= inv_sigma * inv_sigma;
        if (!(h < -1e-300)) return 0.0;
        double step = -g / h;
        const double cap = 20.0 * sigma_;
        step = std::clamp(step, -cap, cap);
        coord += step;
        // Incremental update of u keeps the next coordinate consistent.
        for (std::size_t k = 0; k < n_; ++k) {
            u_[k] += step * (basis ? basis[k] : 1.0) * inv_sigma;
        }
        return std::fabs(step);
    }

    const std::vector<double>& q_;
    std::size_t n_;
    double sigma_;
    double fs_;
    std::vector<double> c_, s_, u_;
};

// (a, b) -> (A >= 0, phi) with x = a cos + b sin = A cos(. + phi).
void fold_amplitude(double a, double b, double& amp, double& phase) {
    amp = std::hypot(a, b);
    phase = std::atan2(-b, a);
}

// ---------------------------------------------------------------------------
// Nelder-Mead over (A, B, omega, phi).
// ---------------------------------------------------------------------------
struct SimplexResult {
    std::array<double, 4> x;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

template <typename Fn>
SimplexResult nelder_mead(std::array<double, 4> x0, std::array<double, 4> scale, Fn&& fn,
                          int max_iter, double rel_tol) {
    constexpr int kDim = 4;
    std::array<std::array<double, 4>, kDim + 1> pts;
    std::array<double, kDim + 1> val;
    pts[0] = x0;
    val[0] = fn(x0);
    for (int i = 0; i < kDim; ++i) {
        pts[i + 1] = x0;
        pts[i + 1][i] += scale[i];
        val[i + 1] = fn(pts[i + 1]);
    }

    SimplexResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        std::array<int, kDim + 1> order;
        for (int i = 0; i <= kDim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });

        const double best = val[order[0]];
        const double worst = val[order[kDim]];
        if (std::isfinite(best) && std::isfinite(worst)) {
            const double spread = std::fabs(worst - best);
            if (spread <= rel_tol * (std::fabs(best) + 1e-12)) {
                res.converged = true;
                break;
            }
        }

        std::array<double, 4> centroid{};
        for (int i = 0; i < kDim; ++i) {
            for (int d = 0; d < kDim; ++d) centroid[d] += pts[order[i]][d] / kDim;
        }

        auto blend = [&](double t) {
            std::array<double, 4> p;
            for (int d = 0; d < kDim; ++d) {
                p[d] = centroid[d] + t * (pts[order[kDim]][d] - centroid[d]);
            }
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = fn(reflected);
        if (fr < val[order[0]]) {
            const auto expanded = blend(-2.0);
            const double fe = fn(expanded);
            if (fe < fr) {
                pts[order[kDim]] = expanded;
                val[order[kDim]] = fe;
            } else {
                pts[order[kDim]] = reflected;
                val[order[kDim]] = fr;
            }
        } else if (fr < val[order[kDim - 1]]) {
            pts[order[kDim]] = reflected;
            val[order[kDim]] = fr;
        } else {
            const auto contracted = blend(fr < val[order[kDim]] ? -0.5 : 0.5);
            const double fc = fn(contracted);
            if (fc < std::min(fr, val[order[kDim]])) {
                pts[order[kDim]] = contracted;
                val[order[kDim]] = fc;
            } else {
                for (int i = 1; i <= kDim; ++i) {
                    for (int d = 0; d < kDim; ++d) {
                        pts[order[i]][d] = 0.5 * (pts[order[i]][d] + pts[order[0]][d]);
                    }
                    val[order[i]] = fn(pts[order[i]]);
                }
            }
        }
    }
    res.iterations = it;

    int best = 0;
    for (int i = 1; i <= kDim; ++i) {
        if (val[i] < val[best]) best = i;
    }
    res.x = pts[best];
    res.value = val[best];
    return res;
}

}  // namespace

double log_likelihood(const RssTrace& trace, const SineParams& params, const AcquisitionSpec& acq) {
    params.validate();
    if (!(acq.noise_std_db > 0.0)) {
        throw UnidentifiableError("sigma = 0: one-bit likelihood is degenerate");
    }
    if (trace.kind != TraceKind::OneBit) throw DomainError("log_likelihood expects a one-bit trace");

    const double w_ts = kTwoPi * params.frequency_hz / trace.sample_rate_hz;
    const double inv_sigma = 1.0 / acq.noise_std_db;
    double ll = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double mu = params.amplitude_db * std::cos(w_ts * static_cast<double>(k) + params.phase_rad) +
                          params.dc_offset_db - trace.one_bit_threshold_db;
        ll += log_normal_cdf(trace.values[k] * mu * inv_sigma);
    }
    return ll;
}

EstimationResult mle_fit(const RssTrace& trace, const FrequencyBand& band, double noise_std_db) {
    if (!(noise_std_db > 0.0)) {
        throw UnidentifiableError("sigma = 0: one-bit likelihood is degenerate");
    }
    const BinaryTrace bin = binarize(trace);
    const std::size_t n = bin.q.size();
    if (n < 8) throw DomainError("trace too short for a 4-parameter fit");
    const double fs = trace.sample_rate_hz;

    const double df = fs / (4.0 * static_cast<double>(n));
    const double lo = std::max(band.lo_hz, df);
    const double hi = std::min(band.hi_hz, 0.5 * fs - df);
    if (!(lo < hi)) throw DomainError("empty frequency search band");
    const std::size_t n_freq = static_cast<std::size_t>(std::floor((hi - lo) / df)) + 1;
    if (n_freq > (1u << 22)) throw DomainError("frequency grid too large; narrow the band");

    FrequencyAscent ascent(bin.q, noise_std_db, fs);

    // Method-of-moments start for the DC coordinate.
    std::size_t positives = 0;
    for (double v : bin.q) {
        if (v > 0) ++positives;
    }
    const double p_hat = (static_cast<double>(positives) + 0.5) / (static_cast<double>(n) + 1.0);
    const double dc0 = noise_std_db * std::clamp(normal_quantile(p_hat), -6.0, 6.0);

    // Stage 1: short warm-started ascent on every grid frequency.
    std::vector<double> lls(n_freq);
    std::vector<AscentState> states(n_freq);
    AscentState warm;
    warm.dc = dc0;
    int total_sweeps = 0;
    for (std::size_t i = 0; i < n_freq; ++i) {
        ascent.set_frequency(lo + static_cast<double>(i) * df);
        AscentState st = warm;
        for (int sweep = 0; sweep < 4; ++sweep) {
            ascent.sweep(st);
            ++total_sweeps;
        }
        st.log_like = ascent.exact_log_likelihood(st);
        lls[i] = st.log_like;
        states[i] = st;
        warm = st;
    }

    // Stage 2: converge the best local maxima of the coarse profile.
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n_freq; ++i) {
        const bool left_ok = (i == 0) || lls[i] >= lls[i - 1];
        const bool right_ok = (i + 1 == n_freq) || lls[i] >= lls[i + 1];
        if (left_ok && right_ok) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](std::size_t a, std::size_t b) { return lls[a] > lls[b]; });
    if (candidates.size() > 8) candidates.resize(8);

    double best_ll = -std::numeric_limits<double>::infinity();
    double best_f = lo;
    AscentState best_state;
    bool ascent_converged = false;
    for (std::size_t idx : candidates) {
        const double f = lo + static_cast<double>(idx) * df;
        ascent.set_frequency(f);
        AscentState st = states[idx];
        bool conv = false;
        for (int sweep = 0; sweep < 60; ++sweep) {
            const double moved = ascent.sweep(st);
            ++total_sweeps;
            if (moved < 1e-9 * noise_std_db) { conv = true; break; }
        }
        st.log_like = ascent.exact_log_likelihood(st);
        if (st.log_like > best_ll) {
            best_ll = st.log_like;
            best_f = f;
            best_state = st;
            ascent_converged = conv;
        }
    }

    double amp0, phase0;
    fold_amplitude(best_state.a, best_state.b, amp0, phase0);

    // Simplex refinement of all four parameters around the grid winner.
    const double w_lo = kTwoPi * lo, w_hi = kTwoPi * hi;
    auto objective = [&](const std::array<double, 4>& x) {
        double amp = x[0], dc = x[1], w = x[2], phase = x[3];
        if (amp < 0.0) {
            amp = -amp;
            phase += kPi;
        }
        if (w < w_lo || w > w_hi) return std::numeric_limits<double>::infinity();
        const double w_ts = w / fs;
        const double inv_sigma = 1.0 / noise_std_db;
        const double cw = std::cos(w_ts), sw = std::sin(w_ts);
        double c = std::cos(phase), s = std::sin(phase);
        double ll = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            ll += log_normal_cdf(bin.q[k] * (amp * c + dc) * inv_sigma);
            const double cn = c * cw - s * sw;
            s = s * cw + c * sw;
            c = cn;
        }
        return -ll;
    };

    const std::array<double, 4> x0 = {amp0, best_state.dc, kTwoPi * best_f, phase0};
    const std::array<double, 4> scale = {std::max(0.1 * amp0, 0.05 * noise_std_db),
                                         0.1 * noise_std_db, kTwoPi * df * 0.5, 0.05};
    const SimplexResult sx = nelder_mead(x0, scale, objective, 200, 1e-6);

    EstimationResult result;
    result.method = EstimationMethod::Mle;
    double amp = sx.x[0], phase = sx.x[3];
    if (amp < 0.0) {
        amp = -amp;
        phase += kPi;
    }
    result.estimate.amplitude_db = amp;
    result.estimate.dc_offset_db = sx.x[1] + bin.threshold_db;
    result.estimate.frequency_hz = std::clamp(sx.x[2] / kTwoPi, lo, hi);
    result.estimate.phase_rad = phase;
    result.estimate = result.estimate.normalized();
    result.log_likelihood = -sx.value;
    result.converged = sx.converged && ascent_converged;
    result.iterations = total_sweeps + sx.iterations;
    return result;
}

EstimationResult periodogram_estimate(const RssTrace& trace, const FrequencyBand& band) {
    const std::size_t n = trace.size();
    if (n < 16) throw DomainError("periodogram needs at least 16 samples");
    const double fs = trace.sample_rate_hz;

    double mean = 0.0;
    for (double v : trace.values) mean += v;
    mean /= static_cast<double>(n);

    const std::size_t padded = next_pow2(8 * n);
    std::vector<std::complex<double>> buf(padded, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) buf[k] = {trace.values[k] - mean, 0.0};
    fft_radix2(buf);

    const double bin_hz = fs / static_cast<double>(padded);
    const double lo = std::max(band.lo_hz, bin_hz);
    const double hi = std::min(band.hi_hz, 0.5 * fs);
    if (!(lo < hi)) throw DomainError("empty frequency search band");

    const std::size_t k_lo = static_cast<std::size_t>(std::ceil(lo / bin_hz));
    const std::size_t k_hi = static_cast<std::size_t>(std::floor(hi / bin_hz));
    std::size_t peak = k_lo;
    double peak_mag = -1.0;
    for (std::size_t k = k_lo; k <= k_hi && k < padded / 2; ++k) {
        const double mag = std::abs(buf[k]);
        if (mag > peak_mag) {
            peak_mag = mag;
            peak = k;
        }
    }
    if (!(peak_mag > 0.0)) {
        throw UnidentifiableError("flat spectrum: constant trace has no tone to estimate");
    }

    // Parabolic interpolation on the magnitude of the peak and neighbours.
    double delta = 0.0;
    if (peak > k_lo && peak + 1 <= k_hi) {
        const double alpha = std::abs(buf[peak - 1]);
        const double beta = peak_mag;
        const double gamma = std::abs(buf[peak + 1]);
        const double denom = alpha - 2.0 * beta + gamma;
        if (denom < 0.0) delta = 0.5 * (alpha - gamma) / denom;
    }

    EstimationResult result;
    result.method = EstimationMethod::Periodogram;
    result.estimate.frequency_hz = (static_cast<double>(peak) + delta) * bin_hz;
    result.estimate.amplitude_db = 2.0 * peak_mag / static_cast<double>(n);
    result.estimate.dc_offset_db = mean;
    result.estimate.phase_rad = std::arg(buf[peak]);
    result.estimate = result.estimate.normalized();
    result.log_likelihood = 0.0;
    result.converged = true;
    result.iterations = 0;
    return result;
}

}  // namespace rss_sentry
