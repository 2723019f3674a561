#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "sweeps.hpp"

using namespace rss_sentry;

namespace {

SineParams paper_point(double amp = 0.025) {
    SineParams p;
    p.amplitude_db = amp;
    p.frequency_hz = 100.0;
    return p;
}

AcquisitionSpec paper_acq(std::uint64_t n = 400) {
    AcquisitionSpec a;
    a.sample_rate_hz = 400.0;
    a.num_samples = n;
    a.noise_std_db = 0.25;  // overridden per sweep point
    return a;
}

}  // namespace

TEST_CASE("default sigma grid brackets the collapse and Gaussian regimes") {
    const auto g = default_sigma_grid(1.0);
    CHECK(g.size() == 60);
    CHECK(g.front() == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(g.back() == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("sweep_noise: U-shape with an interior minimum at step 1 dB") {
    AveragingGrid grid;
    const auto rows = sweep_noise(paper_point(), paper_acq(), 1.0, default_sigma_grid(1.0, 30),
                                  grid);
    REQUIRE(rows.size() == 30);

    std::size_t argmin = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::isfinite(rows[i].std_f_hz) && rows[i].std_f_hz < rows[argmin].std_f_hz) {
            argmin = i;
        }
    }
    CHECK(argmin > 0);
    CHECK(argmin + 1 < rows.size());
    // Interior minimum strictly better than both grid endpoints.
    CHECK(rows[argmin].std_f_hz < rows.front().std_f_hz);
    CHECK(rows[argmin].std_f_hz < rows.back().std_f_hz);
    // The sigma = step/100 endpoint is flagged (deep-saturation cells fail)
    // but still reported.
    CHECK(rows.front().flagged);
    CHECK(std::isfinite(rows.front().std_f_hz));
    CHECK(rows.front().std_f_hz / rows[argmin].std_f_hz >= 3.0);
}

TEST_CASE("sweep_noise: unquantized amplitude reference is monotone in sigma") {
    const auto grid = default_sigma_grid(1.0, 20);
    double prev = 0.0;
    for (double sigma : grid) {
        auto acq = paper_acq();
        acq.noise_std_db = sigma;
        const double std_a = unquantized_crb(paper_point(), acq).std_a_db;
        CHECK(std_a > prev);
        prev = std_a;
    }
}

TEST_CASE("optimal_noise: sigma_opt is about a quarter step") {
    AveragingGrid grid;
    const OptimalNoiseResult r = optimal_noise(1.0, paper_point(), paper_acq(), grid);
    CHECK(!r.non_unimodal);
    CHECK(r.sigma_opt_db / 1.0 > 0.20);
    CHECK(r.sigma_opt_db / 1.0 < 0.30);
    // Amplitude and frequency optima coincide closely.
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(0.05));
    // Below the quantization-error std, step/sqrt(12).
    CHECK(r.sigma_opt_db < 1.0 / std::sqrt(12.0));
}

TEST_CASE("optimal_noise: linear scaling in the step size") {
    AveragingGrid grid;
    double prev = 0.0;
    for (double step : {0.5, 1.0, 2.0}) {
        const OptimalNoiseResult r = optimal_noise(step, paper_point(), paper_acq(), grid);
        const OptimalNoiseResult r2 = optimal_noise(2.0 * step, paper_point(), paper_acq(), grid);
        CHECK(r2.sigma_opt_db / r.sigma_opt_db == doctest::Approx(2.0).epsilon(0.10));
        CHECK(r.sigma_opt_db < step / std::sqrt(12.0));
        CHECK(r.sigma_opt_db > prev);
        prev = r.sigma_opt_db;
    }
}

TEST_CASE("optimal_noise: fine-grid oracle places the 0.5 dB minimum near 0.125") {
    AveragingGrid grid;
    const OptimalNoiseResult r = optimal_noise(0.5, paper_point(), paper_acq(), grid);
    CHECK(std::fabs(r.sigma_opt_db - 0.125) / 0.125 < 0.20);
}

TEST_CASE("sweep_step_size: bounds are monotone nondecreasing in the step") {
    AveragingGrid grid;
    const auto rows = sweep_step_size(paper_point(), paper_acq(), {0.5, 1.0, 2.0, 4.0}, grid);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].min_std_a_db >= rows[i - 1].min_std_a_db * (1.0 - 1e-9));
        CHECK(rows[i].min_std_f_hz >= rows[i - 1].min_std_f_hz * (1.0 - 1e-9));
    }
}

TEST_CASE("sweep_sample_rate: strict decrease with fs under the scale policy") {
    AveragingGrid grid;
    for (double step : {0.5, 1.0, 4.0}) {
        const auto rows = sweep_sample_rate(paper_point(), 0.25, step,
                                            {1.0, 4.0, 16.0, 64.0, 256.0, 400.0}, 16.0,
                                            NyquistPolicy::Scale, grid);
        REQUIRE(rows.size() == 6);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(std::isfinite(rows[i].std_f_hz));
            CHECK(rows[i].failed_fraction == 0.0);
            if (i > 0) {
                CHECK(rows[i].std_a_db < rows[i - 1].std_a_db);
                CHECK(rows[i].std_f_hz < rows[i - 1].std_f_hz);
            }
        }
        // N = fs * t_obs and the scaled frequency stays below Nyquist.
        CHECK(rows[0].num_samples == 16);
        CHECK(rows[0].f_hz == doctest::Approx(100.0 / 400.0).epsilon(1e-12));
        CHECK(rows[5].f_hz == doctest::Approx(100.0).epsilon(1e-12));
    }
}

TEST_CASE("sweep_sample_rate: reject policy refuses sub-Nyquist rates") {
    AveragingGrid grid;
    CHECK_THROWS_AS(sweep_sample_rate(paper_point(), 0.25, 1.0, {50.0, 400.0}, 1.0,
                                      NyquistPolicy::Reject, grid),
                    DomainError);
    // All-above-Nyquist grid passes.
    const auto rows = sweep_sample_rate(paper_point(), 0.25, 1.0, {256.0, 400.0}, 1.0,
                                        NyquistPolicy::Reject, grid);
    CHECK(rows.size() == 2);
    CHECK(rows[0].f_hz == 100.0);
}

TEST_CASE("sweep_contour: corner optimality and step-sweep consistency") {
    AveragingGrid grid;
    const std::vector<double> fs_grid = {100.0, 400.0};
    const std::vector<double> delta_grid = {0.5, 1.0};
    const auto cells = sweep_contour(paper_point(), fs_grid, delta_grid, 1.0,
                                     NyquistPolicy::Scale, grid);
    REQUIRE(cells.size() == 4);
    // Monotone along each axis: best cell is (max fs, min step).
    double best = 1e300;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].min_std_f_hz < best) {
            best = cells[i].min_std_f_hz;
            best_idx = i;
        }
    }
    CHECK(cells[best_idx].fs_hz == 400.0);
    CHECK(cells[best_idx].step_db == 0.5);

    // The fs = 400 row reproduces sweep_step_size (same deterministic path).
    const auto step_rows = sweep_step_size(paper_point(), paper_acq(), delta_grid, grid);
    for (std::size_t j = 0; j < delta_grid.size(); ++j) {
        const auto& cell = cells[1 * delta_grid.size() + j];
        CHECK(cell.min_std_f_hz == doctest::Approx(step_rows[j].min_std_f_hz).epsilon(1e-12));
        CHECK(cell.min_std_a_db == doctest::Approx(step_rows[j].min_std_a_db).epsilon(1e-12));
    }
}

TEST_CASE("sweep grids are validated") {
    AveragingGrid grid;
    CHECK_THROWS_AS(sweep_noise(paper_point(), paper_acq(), 1.0, {0.5, 0.4}, grid), DomainError);
    CHECK_THROWS_AS(sweep_noise(paper_point(), paper_acq(), 1.0, {}, grid), DomainError);
    CHECK_THROWS_AS(sweep_step_size(paper_point(), paper_acq(), {-1.0, 1.0}, grid), DomainError);
    CHECK_THROWS_AS(default_sigma_grid(-1.0), DomainError);
}
