#pragma once

#include <array>
#include <cstdint>

#include "linalg.hpp"
#include "trace.hpp"

namespace rss_sentry {

// 4x4 Fisher information for theta = (A, B, omega, phi) under one-bit
// quantization, together with the operating point it was evaluated at.
struct FisherMatrix {
    Mat4 entries{};
    SineParams params;
    AcquisitionSpec acq;
};

// Diagonal of the inverse FIM mapped to named bounds. omega is in rad/s,
// std_f_hz = sqrt(crb_omega) / (2 pi).
struct CrbResult {
    double crb_a_db2 = 0.0;
    double crb_b_db2 = 0.0;
    double crb_omega_rad2_s2 = 0.0;
    double crb_phi_rad2 = 0.0;
    double std_a_db = 0.0;
    double std_f_hz = 0.0;
    double condition = 0.0;
};

struct AveragingGrid {
    int phases = 32;   // uniform over [0, 2pi)
    int offsets = 33;  // uniform over [-step/2, step/2], inclusive
    bool average_fim = false;  // false: mean of per-cell CRBs (default)
    int threads = 0;           // <= 0: all hardware threads

    void validate() const;
};

// CRB averaged over the (phi, B) grid. Singular cells are excluded from
// the mean and counted; failed_fraction > 5% sets `flagged`.
struct AveragedCrb {
    double crb_a_db2 = 0.0;
    double crb_omega_rad2_s2 = 0.0;
    double std_a_db = 0.0;
    double std_f_hz = 0.0;
    double failed_fraction = 0.0;
    bool flagged = false;
};

inline constexpr double kFimConditionMax = 1e12;
inline constexpr double kAveragedCrbFlagFraction = 0.05;

// P(y[k] = q) for q in {-1, +1}: (1/2) erfc(-q (A C_k + B) / (sqrt(2) sigma)).
double pmf_one_bit(int q, std::uint64_t k, const SineParams& params, const AcquisitionSpec& acq);

// Analytic per-sample score d log f / d(A, B, omega, phi).
std::array<double, 4> score_one_bit(int q, std::uint64_t k, const SineParams& params,
                                    const AcquisitionSpec& acq);

// Full-record FIM: (2 / (pi sigma^2)) sum_k w(u_k) F_k with the stable
// one-bit weight. Symmetric PSD by construction.
FisherMatrix fim(const SineParams& params, const AcquisitionSpec& acq);

// Invert the FIM at one operating point; throws SingularFimError when the
// condition number exceeds kFimConditionMax.
CrbResult crb_point(const SineParams& params, const AcquisitionSpec& acq);

// Average the CRB over phase x DC-offset for a quantizer step. phase/dc
// fields of `params` give the grid origin. Throws when every cell fails.
AveragedCrb crb_averaged(const SineParams& params, const AcquisitionSpec& acq, double step_db,
                         const AveragingGrid& grid);

// Closed-form unquantized single-tone reference bounds:
//   var(A) >= 2 sigma^2 / N
//   var(omega) >= 24 sigma^2 / (A^2 Ts^2 N (N^2 - 1))
double unquantized_crb_a_db2(const AcquisitionSpec& acq);
CrbResult unquantized_crb(const SineParams& params, const AcquisitionSpec& acq);

// Exact FIM of the unquantized linear-Gaussian model (1/sigma^2 sum F_k);
// the oracle the closed forms are checked against.
FisherMatrix unquantized_fim(const SineParams& params, const AcquisitionSpec& acq);

}  // namespace rss_sentry
