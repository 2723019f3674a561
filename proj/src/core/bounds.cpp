#include "bounds.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "math_special.hpp"
#include "parallel.hpp"

namespace rss_sentry {

namespace {

void require_identifiable_sigma(const AcquisitionSpec& acq) {
    if (!(acq.noise_std_db > 0.0)) {
        throw UnidentifiableError("sigma = 0: one-bit likelihood is degenerate");
    }
}

// Accumulate sum_k weight(u_k) * v_k v_k^T for v_k = (C_k, 1, -A k Ts S_k, -A S_k).
template <typename WeightFn>
Mat4 accumulate_fk(const SineParams& p, const AcquisitionSpec& acq, WeightFn&& weight_of_u) {
    const double ts = acq.sample_period_s();
    const double w_ts = kTwoPi * p.frequency_hz * ts;
    const double inv_sigma = 1.0 / acq.noise_std_db;

    Mat4 sum{};
    for (std::uint64_t k = 0; k < acq.num_samples; ++k) {
        const double arg = w_ts * static_cast<double>(k) + p.phase_rad;
        const double c = std::cos(arg);
        const double s = std::sin(arg);
        const double u = (p.amplitude_db * c + p.dc_offset_db) * inv_sigma;
        const double w = weight_of_u(u);
        if (!std::isfinite(w)) {
            throw NumericError("non-finite FIM weight at sample k=" + std::to_string(k));
        }
        if (w == 0.0) continue;

        const double kts = static_cast<double>(k) * ts;
        const double v[4] = {c, 1.0, -p.amplitude_db * kts * s, -p.amplitude_db * s};
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                sum[i][j] += w * v[i] * v[j];
            }
        }
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < i; ++j) sum[i][j] = sum[j][i];
    }
    return sum;
}

CrbResult crb_from_fisher(const FisherMatrix& info) {
    const InverseResult inv = invert_spd4(info.entries, kFimConditionMax);
    if (!inv.ok) {
        throw SingularFimError(
            "Fisher matrix singular or ill-conditioned (condition " +
                std::to_string(inv.condition) + ")",
            inv.condition);
    }
    CrbResult out;
    out.crb_a_db2 = inv.inverse[0][0];
    out.crb_b_db2 = inv.inverse[1][1];
    out.crb_omega_rad2_s2 = inv.inverse[2][2];
    out.crb_phi_rad2 = inv.inverse[3][3];
    out.std_a_db = std::sqrt(out.crb_a_db2);
    out.std_f_hz = std::sqrt(out.crb_omega_rad2_s2) / kTwoPi;
    out.condition = inv.condition;
    return out;
}

}  // namespace

void AveragingGrid::validate() const {
    if (phases < 1 || offsets < 1) throw DomainError("averaging grid counts must be >= 1");
}

double pmf_one_bit(int q, std::uint64_t k, const SineParams& params, const AcquisitionSpec& acq) {
    if (q != 1 && q != -1) throw DomainError("q must be +1 or -1");
    params.validate();
    acq.validate();
    require_identifiable_sigma(acq);
    const double arg = kTwoPi * params.frequency_hz * acq.sample_period_s() *
                           static_cast<double>(k) + params.phase_rad;
    const double u = (params.amplitude_db * std::cos(arg) + params.dc_offset_db) / acq.noise_std_db;
    return normal_cdf(q * u);
}

std::array<double, 4> score_one_bit(int q, std::uint64_t k, const SineParams& params,
                                    const AcquisitionSpec& acq) {
    if (q != 1 && q != -1) throw DomainError("q must be +1 or -1");
    params.validate();
    acq.validate();
    require_identifiable_sigma(acq);

    const double ts = acq.sample_period_s();
    const double arg = kTwoPi * params.frequency_hz * ts * static_cast<double>(k) + params.phase_rad;
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    const double sigma = acq.noise_std_db;
    const double u = (params.amplitude_db * c + params.dc_offset_db) / sigma;

    // d log Phi(q u) / d theta_i = q (du/dtheta_i) * phi(u)/Phi(qu).
    const double ratio = mills_ratio(static_cast<double>(q) * u);
    const double common = static_cast<double>(q) * ratio / sigma;
    const double kts = static_cast<double>(k) * ts;
    return {common * c, common, -common * params.amplitude_db * kts * s,
            -common * params.amplitude_db * s};
}

FisherMatrix fim(const SineParams& params, const AcquisitionSpec& acq) {
    params.validate();
    acq.validate();
    require_identifiable_sigma(acq);
    if (acq.num_samples < 4) throw DomainError("FIM needs at least 4 samples");

    FisherMatrix out;
    out.params = params;
    out.acq = acq;
    out.entries = accumulate_fk(params, acq, [](double u) { return one_bit_fisher_weight(u); });

    const double scale = 2.0 / (kPi * acq.noise_std_db * acq.noise_std_db);
    for (auto& row : out.entries) {
        for (auto& e : row) e *= scale;
    }
    return out;
}

CrbResult crb_point(const SineParams& params, const AcquisitionSpec& acq) {
    return crb_from_fisher(fim(params, acq));
}

AveragedCrb crb_averaged(const SineParams& params, const AcquisitionSpec& acq, double step_db,
                         const AveragingGrid& grid) {
    grid.validate();
    if (!(step_db > 0.0)) throw DomainError("quantizer step must be > 0");

    const int n_phi = grid.phases;
    const int n_off = grid.offsets;
    const std::size_t cells = static_cast<std::size_t>(n_phi) * n_off;

    std::vector<double> phases(n_phi);
    for (int i = 0; i < n_phi; ++i) {
        phases[i] = params.phase_rad + kTwoPi * static_cast<double>(i) / n_phi;
    }
    std::vector<double> offsets(n_off);
    if (n_off == 1) {
        offsets[0] = 0.0;
    } else {
        for (int j = 0; j < n_off; ++j) {
            offsets[j] = -0.5 * step_db + step_db * static_cast<double>(j) / (n_off - 1);
        }
    }

    if (grid.average_fim) {
        // Average the information matrix over the grid, invert once.
        std::vector<Mat4> fims(cells);
        parallel_for(cells, grid.threads, [&](std::size_t idx) {
            SineParams cell = params;
            cell.phase_rad = phases[idx / n_off];
            cell.dc_offset_db = offsets[idx % n_off];
            fims[idx] = fim(cell, acq).entries;
        });
        FisherMatrix mean;
        mean.params = params;
        mean.acq = acq;
        for (const auto& m : fims) {
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) mean.entries[i][j] += m[i][j];
        }
        for (auto& row : mean.entries) {
            for (auto& e : row) e /= static_cast<double>(cells);
        }
        const CrbResult point = crb_from_fisher(mean);  // throws if singular
        AveragedCrb out;
        out.crb_a_db2 = point.crb_a_db2;
        out.crb_omega_rad2_s2 = point.crb_omega_rad2_s2;
        out.std_a_db = point.std_a_db;
        out.std_f_hz = point.std_f_hz;
        return out;
    }

    struct Cell {
        double crb_a = 0.0;
        double crb_w = 0.0;
        bool ok = false;
    };
    std::vector<Cell> results(cells);
    parallel_for(cells, grid.threads, [&](std::size_t idx) {
        SineParams cell = params;
        cell.phase_rad = phases[idx / n_off];
        cell.dc_offset_db = offsets[idx % n_off];
        try {
            const CrbResult r = crb_point(cell, acq);
            results[idx] = {r.crb_a_db2, r.crb_omega_rad2_s2, true};
        } catch (const SingularFimError&) {
            results[idx].ok = false;
        }
    });

    double sum_a = 0.0, sum_w = 0.0;
    std::size_t good = 0;
    for (const auto& cell : results) {
        if (!cell.ok) continue;
        sum_a += cell.crb_a;
        sum_w += cell.crb_w;
        ++good;
    }
    if (good == 0) {
        throw SingularFimError("all averaging cells singular", 0.0);
    }

    AveragedCrb out;
    out.crb_a_db2 = sum_a / static_cast<double>(good);
    out.crb_omega_rad2_s2 = sum_w / static_cast<double>(good);
    out.std_a_db = std::sqrt(out.crb_a_db2);
    out.std_f_hz = std::sqrt(out.crb_omega_rad2_s2) / kTwoPi;
    out.failed_fraction =
        static_cast<double>(cells - good) / static_cast<double>(cells);
    out.flagged = out.failed_fraction > kAveragedCrbFlagFraction;
    return out;
}

double unquantized_crb_a_db2(const AcquisitionSpec& acq) {
    acq.validate();
    if (!(acq.noise_std_db > 0.0)) throw DomainError("unquantized bound needs sigma > 0");
    return 2.0 * acq.noise_std_db * acq.noise_std_db / static_cast<double>(acq.num_samples);
}

FisherMatrix unquantized_fim(const SineParams& params, const AcquisitionSpec& acq) {
    params.validate();
    acq.validate();
    if (!(acq.noise_std_db > 0.0)) throw DomainError("unquantized FIM needs sigma > 0");

    FisherMatrix out;
    out.params = params;
    out.acq = acq;
    out.entries = accumulate_fk(params, acq, [](double) { return 1.0; });
    const double scale = 1.0 / (acq.noise_std_db * acq.noise_std_db);
    for (auto& row : out.entries) {
        for (auto& e : row) e *= scale;
    }
    return out;
}

CrbResult unquantized_crb(const SineParams& params, const AcquisitionSpec& acq) {
    params.validate();
    acq.validate();
    if (!(acq.noise_std_db > 0.0)) throw DomainError("unquantized bound needs sigma > 0");
    if (!(params.amplitude_db > 0.0)) throw DomainError("frequency bound needs A > 0");
    if (acq.num_samples < 3) throw DomainError("unquantized bound needs N >= 3");

    const double sigma2 = acq.noise_std_db * acq.noise_std_db;
    const double n = static_cast<double>(acq.num_samples);
    const double ts = acq.sample_period_s();
    const double a2 = params.amplitude_db * params.amplitude_db;

    CrbResult out;
    out.crb_a_db2 = 2.0 * sigma2 / n;
    out.crb_omega_rad2_s2 = 24.0 * sigma2 / (a2 * ts * ts * n * (n * n - 1.0));
    out.std_a_db = std::sqrt(out.crb_a_db2);
    out.std_f_hz = std::sqrt(out.crb_omega_rad2_s2) / kTwoPi;

    // Nuisance-parameter bounds and conditioning from the exact
    // linear-Gaussian FIM.
    const InverseResult inv = invert_spd4(unquantized_fim(params, acq).entries, kFimConditionMax);
    if (inv.ok) {
        out.crb_b_db2 = inv.inverse[1][1];
        out.crb_phi_rad2 = inv.inverse[3][3];
        out.condition = inv.condition;
    } else {
        out.crb_b_db2 = sigma2 / n;
        out.crb_phi_rad2 = 0.0;
        out.condition = inv.condition;
    }
    return out;
}

}  // namespace rss_sentry
