#pragma once

#include <vector>

#include "bounds.hpp"

namespace rss_sentry {

// Default sigma search grid: 60 log-spaced points spanning [step/100, 3*step],
// bracketing both the quantizer-collapse regime and the Gaussian-dominated one.
std::vector<double> default_sigma_grid(double step_db, int points = 60);

struct NoiseSweepRow {
    double sigma_db = 0.0;
    double std_a_db = 0.0;   // NaN when the cell failed
    double std_f_hz = 0.0;   // NaN when the cell failed
    double failed_fraction = 0.0;
    bool flagged = false;    // failure fraction above 5%, or total failure
};

// Averaged bound vs pre-quantization noise sigma. params.dc_offset is the
// averaging variable; params.noise_std is overridden per row.
std::vector<NoiseSweepRow> sweep_noise(const SineParams& params, const AcquisitionSpec& acq,
                                       double step_db, const std::vector<double>& sigma_grid,
                                       const AveragingGrid& grid);

struct OptimalNoiseResult {
    double sigma_opt_db = 0.0;     // argmin of averaged CRB(omega)
    double sigma_opt_a_db = 0.0;   // argmin of averaged CRB(A)
    double ratio = 0.0;            // sigma_opt_a / sigma_opt
    double min_std_f_hz = 0.0;     // bound value at sigma_opt
    double min_std_a_db = 0.0;     // bound value at sigma_opt_a
    bool non_unimodal = false;     // grid argmin returned without refinement
};

// Golden-section-refined search for the noise level minimizing the averaged
// bounds. Grid points whose averaged result is flagged (failure fraction
// beyond 5%) are treated as unreliable and skipped during the search.
OptimalNoiseResult optimal_noise(double step_db, const SineParams& params,
                                 const AcquisitionSpec& acq, const AveragingGrid& grid,
                                 const std::vector<double>& sigma_grid = {});

struct StepSweepRow {
    double step_db = 0.0;
    double sigma_opt_db = 0.0;
    double sigma_opt_a_db = 0.0;
    double min_std_a_db = 0.0;  // min over sigma of averaged std(A)
    double min_std_f_hz = 0.0;  // min over sigma of averaged std(f)
    bool flagged = false;
};

std::vector<StepSweepRow> sweep_step_size(const SineParams& params, const AcquisitionSpec& acq,
                                          const std::vector<double>& delta_grid,
                                          const AveragingGrid& grid);

// Sub-Nyquist handling for rate sweeps. The bound itself is defined for any
// f/fs, but integer cycle ratios make the FIM structurally singular, so the
// default refuses f >= fs/2 and `Scale` shrinks f proportionally with fs
// (keeping f at its given value for the fastest grid point).
enum class NyquistPolicy { Reject, Scale };

struct RateSweepRow {
    double fs_hz = 0.0;
    double f_hz = 0.0;          // effective frequency used for this row
    std::uint64_t num_samples = 0;
    double std_a_db = 0.0;      // NaN on failure
    double std_f_hz = 0.0;      // NaN on failure
    double failed_fraction = 0.0;
    bool flagged = false;
};

// Bound vs sampling rate at fixed sigma; N = round(fs * t_obs).
std::vector<RateSweepRow> sweep_sample_rate(const SineParams& params, double sigma_db,
                                            double step_db, const std::vector<double>& fs_grid,
                                            double t_obs_s, NyquistPolicy policy,
                                            const AveragingGrid& grid);

struct ContourCell {
    double fs_hz = 0.0;
    double step_db = 0.0;
    double min_std_a_db = 0.0;
    double min_std_f_hz = 0.0;
    bool flagged = false;
};

// Min-over-sigma bounds on a (fs, step) grid; row-major over fs then step.
std::vector<ContourCell> sweep_contour(const SineParams& params, const std::vector<double>& fs_grid,
                                       const std::vector<double>& delta_grid, double t_obs_s,
                                       NyquistPolicy policy, const AveragingGrid& grid);

}  // namespace rss_sentry
