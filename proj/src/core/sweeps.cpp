#include "sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "constants.hpp"
#include "errors.hpp"

namespace rss_sentry {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_grid_positive_increasing(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
    double prev = 0.0;
    for (double v : grid) {
        if (!(v > prev)) {
            throw DomainError(std::string(name) + " grid must be positive and strictly increasing");
        }
        prev = v;
    }
}

struct SigmaCurvePoint {
    double sigma;
    double crb_a;
    double crb_w;
    bool usable;  // computed and not flagged
};

std::vector<SigmaCurvePoint> evaluate_sigma_curve(const SineParams& params,
                                                  const AcquisitionSpec& acq, double step_db,
                                                  const std::vector<double>& sigma_grid,
                                                  const AveragingGrid& grid) {
    std::vector<SigmaCurvePoint> curve;
    curve.reserve(sigma_grid.size());
    for (double sigma : sigma_grid) {
        AcquisitionSpec a = acq;
        a.noise_std_db = sigma;
        SigmaCurvePoint pt{sigma, kNan, kNan, false};
        try {
            const AveragedCrb r = crb_averaged(params, a, step_db, grid);
            pt.crb_a = r.crb_a_db2;
            pt.crb_w = r.crb_omega_rad2_s2;
            pt.usable = !r.flagged;
        } catch (const NumericError&) {
            // total failure at this sigma; reported as NaN
        }
        curve.push_back(pt);
    }
    return curve;
}

// Golden-section refinement on log(sigma) between the grid neighbours of the
// argmin. `value` maps sigma -> averaged CRB (quantity being minimized).
template <typename ValueFn>
double golden_refine(double lo, double hi, ValueFn&& value) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::log(lo), b = std::log(hi);
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = value(std::exp(c));
    double fd = value(std::exp(d));
    for (int it = 0; it < 60 && (b - a) > 1e-3; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - kInvPhi * (b - a);
            fc = value(std::exp(c));
        } else {
            a = c; c = d; fc = fd;
            d = a + kInvPhi * (b - a);
            fd = value(std::exp(d));
        }
    }
    return std::exp(0.5 * (a + b));
}

// True when the usable part of the curve decreases to a single minimum and
// increases afterwards (tiny numeric wiggles tolerated).
bool is_unimodal(const std::vector<double>& v, std::size_t argmin) {
    constexpr double kTol = 1e-9;
    for (std::size_t i = 0; i + 1 < argmin; ++i) {
        if (v[i + 1] > v[i] * (1.0 + kTol)) return false;
    }
    for (std::size_t i = argmin; i + 1 < v.size(); ++i) {
        if (v[i + 1] < v[i] * (1.0 - kTol)) return false;
    }
    return true;
}

struct AxisOptimum {
    double sigma_opt;
    double min_value;  // CRB (variance) at the optimum
    bool non_unimodal;
};

AxisOptimum optimize_axis(const std::vector<SigmaCurvePoint>& curve, bool omega_axis,
                          const SineParams& params, const AcquisitionSpec& acq, double step_db,
                          const AveragingGrid& grid) {
    std::vector<double> sig, val;
    for (const auto& pt : curve) {
        if (!pt.usable) continue;
        sig.push_back(pt.sigma);
        val.push_back(omega_axis ? pt.crb_w : pt.crb_a);
    }
    if (sig.empty()) {
        throw SingularFimError("no usable sigma grid point (all flagged or singular)", 0.0);
    }

    std::size_t argmin = 0;
    for (std::size_t i = 1; i < val.size(); ++i) {
        if (val[i] < val[argmin]) argmin = i;
    }

    auto value_at = [&](double sigma) {
        AcquisitionSpec a = acq;
        a.noise_std_db = sigma;
        try {
            const AveragedCrb r = crb_averaged(params, a, step_db, grid);
            if (r.flagged) return std::numeric_limits<double>::infinity();
            return omega_axis ? r.crb_omega_rad2_s2 : r.crb_a_db2;
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    AxisOptimum out{};
    if (!is_unimodal(val, argmin)) {
        out.sigma_opt = sig[argmin];
        out.min_value = val[argmin];
        out.non_unimodal = true;
        return out;
    }

    const double lo = argmin > 0 ? sig[argmin - 1] : sig[argmin];
    const double hi = argmin + 1 < sig.size() ? sig[argmin + 1] : sig[argmin];
    if (lo == hi) {
        out.sigma_opt = sig[argmin];
        out.min_value = val[argmin];
        return out;
    }
    out.sigma_opt = golden_refine(lo, hi, value_at);
    out.min_value = value_at(out.sigma_opt);
    if (!(out.min_value <= val[argmin])) {
        // Refinement never accepts a worse point than the grid winner.
        out.sigma_opt = sig[argmin];
        out.min_value = val[argmin];
    }
    return out;
}

}  // namespace

std::vector<double> default_sigma_grid(double step_db, int points) {
    if (!(step_db > 0.0)) throw DomainError("quantizer step must be > 0");
    if (points < 2) throw DomainError("sigma grid needs at least 2 points");
    const double lo = std::log(step_db / 100.0);
    const double hi = std::log(3.0 * step_db);
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (points - 1));
    }
    return grid;
}

std::vector<NoiseSweepRow> sweep_noise(const SineParams& params, const AcquisitionSpec& acq,
                                       double step_db, const std::vector<double>& sigma_grid,
                                       const AveragingGrid& grid) {
    check_grid_positive_increasing(sigma_grid, "sigma");
    std::vector<NoiseSweepRow> rows;
    rows.reserve(sigma_grid.size());
    for (double sigma : sigma_grid) {
        AcquisitionSpec a = acq;
        a.noise_std_db = sigma;
        NoiseSweepRow row;
        row.sigma_db = sigma;
        try {
            const AveragedCrb r = crb_averaged(params, a, step_db, grid);
            row.std_a_db = r.std_a_db;
            row.std_f_hz = r.std_f_hz;
            row.failed_fraction = r.failed_fraction;
            row.flagged = r.flagged;
        } catch (const NumericError&) {
            row.std_a_db = kNan;
            row.std_f_hz = kNan;
            row.failed_fraction = 1.0;
            row.flagged = true;
        }
        rows.push_back(row);
    }
    return rows;
}

OptimalNoiseResult optimal_noise(double step_db, const SineParams& params,
                                 const AcquisitionSpec& acq, const AveragingGrid& grid,
                                 const std::vector<double>& sigma_grid) {
    const std::vector<double> sigmas =
        sigma_grid.empty() ? default_sigma_grid(step_db) : sigma_grid;
    check_grid_positive_increasing(sigmas, "sigma");

    const auto curve = evaluate_sigma_curve(params, acq, step_db, sigmas, grid);
    const AxisOptimum omega = optimize_axis(curve, true, params, acq, step_db, grid);
    const AxisOptimum amp = optimize_axis(curve, false, params, acq, step_db, grid);

    OptimalNoiseResult out;
    out.sigma_opt_db = omega.sigma_opt;
    out.sigma_opt_a_db = amp.sigma_opt;
    out.ratio = amp.sigma_opt / omega.sigma_opt;
    out.min_std_f_hz = std::sqrt(omega.min_value) / kTwoPi;
    out.min_std_a_db = std::sqrt(amp.min_value);
    out.non_unimodal = omega.non_unimodal || amp.non_unimodal;
    return out;
}

std::vector<StepSweepRow> sweep_step_size(const SineParams& params, const AcquisitionSpec& acq,
                                          const std::vector<double>& delta_grid,
                                          const AveragingGrid& grid) {
    check_grid_positive_increasing(delta_grid, "step");
    std::vector<StepSweepRow> rows;
    rows.reserve(delta_grid.size());
    for (double step : delta_grid) {
        StepSweepRow row;
        row.step_db = step;
        try {
            const OptimalNoiseResult opt = optimal_noise(step, params, acq, grid);
            row.sigma_opt_db = opt.sigma_opt_db;
            row.sigma_opt_a_db = opt.sigma_opt_a_db;
            row.min_std_a_db = opt.min_std_a_db;
            row.min_std_f_hz = opt.min_std_f_hz;
            row.flagged = opt.non_unimodal;
        } catch (const NumericError&) {
            row.sigma_opt_db = kNan;
            row.sigma_opt_a_db = kNan;
            row.min_std_a_db = kNan;
            row.min_std_f_hz = kNan;
            row.flagged = true;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<RateSweepRow> sweep_sample_rate(const SineParams& params, double sigma_db,
                                            double step_db, const std::vector<double>& fs_grid,
                                            double t_obs_s, NyquistPolicy policy,
                                            const AveragingGrid& grid) {
    check_grid_positive_increasing(fs_grid, "fs");
    if (!(sigma_db > 0.0)) throw DomainError("sigma must be > 0");
    if (!(t_obs_s > 0.0)) throw DomainError("observation time must be > 0");

    const double fs_ref = fs_grid.back();
    std::vector<RateSweepRow> rows;
    rows.reserve(fs_grid.size());
    for (double fs : fs_grid) {
        RateSweepRow row;
        row.fs_hz = fs;
        double f_eff = params.frequency_hz;
        if (policy == NyquistPolicy::Scale) {
            f_eff = params.frequency_hz * fs / fs_ref;
        } else if (!(params.frequency_hz < 0.5 * fs)) {
            throw DomainError("f >= fs/2 at fs=" + std::to_string(fs) +
                              "; rerun with the scale policy to sweep below Nyquist");
        }
        row.f_hz = f_eff;
        row.num_samples = static_cast<std::uint64_t>(std::llround(fs * t_obs_s));

        SineParams p = params;
        p.frequency_hz = f_eff;
        AcquisitionSpec a;
        a.sample_rate_hz = fs;
        a.num_samples = row.num_samples;
        a.noise_std_db = sigma_db;

        try {
            if (row.num_samples < 4) throw DomainError("fewer than 4 samples");
            const AveragedCrb r = crb_averaged(p, a, step_db, grid);
            row.std_a_db = r.std_a_db;
            row.std_f_hz = r.std_f_hz;
            row.failed_fraction = r.failed_fraction;
            row.flagged = r.flagged;
        } catch (const std::runtime_error&) {
            row.std_a_db = kNan;
            row.std_f_hz = kNan;
            row.failed_fraction = 1.0;
            row.flagged = true;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<ContourCell> sweep_contour(const SineParams& params, const std::vector<double>& fs_grid,
                                       const std::vector<double>& delta_grid, double t_obs_s,
                                       NyquistPolicy policy, const AveragingGrid& grid) {
    check_grid_positive_increasing(fs_grid, "fs");
    check_grid_positive_increasing(delta_grid, "step");
    if (!(t_obs_s > 0.0)) throw DomainError("observation time must be > 0");

    const double fs_ref = fs_grid.back();
    std::vector<ContourCell> cells;
    cells.reserve(fs_grid.size() * delta_grid.size());
    for (double fs : fs_grid) {
        double f_eff = params.frequency_hz;
        if (policy == NyquistPolicy::Scale) {
            f_eff = params.frequency_hz * fs / fs_ref;
        } else if (!(params.frequency_hz < 0.5 * fs)) {
            throw DomainError("f >= fs/2 at fs=" + std::to_string(fs) +
                              "; rerun with the scale policy to sweep below Nyquist");
        }
        SineParams p = params;
        p.frequency_hz = f_eff;
        AcquisitionSpec a;
        a.sample_rate_hz = fs;
        a.num_samples = static_cast<std::uint64_t>(std::llround(fs * t_obs_s));

        for (double step : delta_grid) {
            ContourCell cell;
            cell.fs_hz = fs;
            cell.step_db = step;
            try {
                if (a.num_samples < 4) throw DomainError("fewer than 4 samples");
                const OptimalNoiseResult opt = optimal_noise(step, p, a, grid);
                cell.min_std_a_db = opt.min_std_a_db;
                cell.min_std_f_hz = opt.min_std_f_hz;
                cell.flagged = opt.non_unimodal;
            } catch (const std::runtime_error&) {
                cell.min_std_a_db = kNan;
                cell.min_std_f_hz = kNan;
                cell.flagged = true;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace rss_sentry
