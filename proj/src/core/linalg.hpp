#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace rss_sentry {

using Mat4 = std::array<std::array<double, 4>, 4>;

struct EigResult {
    std::array<double, 4> values;  // ascending
    Mat4 vectors;                  // columns are eigenvectors
};

// Cyclic Jacobi eigendecomposition of a symmetric 4x4 matrix.
EigResult eig_sym4(const Mat4& m);

struct InverseResult {
    Mat4 inverse;
    double condition;  // |lambda_max| / |lambda_min|
    bool ok;
};

// PSD-aware inverse with a condition-number guard. ok == false when the
// matrix is singular or the condition exceeds cond_max.
InverseResult invert_spd4(const Mat4& m, double cond_max);

// Least-squares polynomial fit of the given degree; coeffs[i] multiplies x^i.
std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree);

// Coefficient of determination of the fit.
double r_squared(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& coeffs);

}  // namespace rss_sentry
