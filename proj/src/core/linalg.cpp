#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace rss_sentry {

EigResult eig_sym4(const Mat4& m) {
    Mat4 a = m;
    Mat4 v{};
    for (int i = 0; i < 4; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-300) break;

        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < 4; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 4; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    EigResult res;
    std::array<int, 4> order = {0, 1, 2, 3};
    std::array<double, 4> lam = {a[0][0], a[1][1], a[2][2], a[3][3]};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return lam[i] < lam[j]; });
    for (int i = 0; i < 4; ++i) {
        res.values[i] = lam[order[i]];
        for (int k = 0; k < 4; ++k) res.vectors[k][i] = v[k][order[i]];
    }
    return res;
}

InverseResult invert_spd4(const Mat4& m, double cond_max) {
    InverseResult out{};
    const EigResult eig = eig_sym4(m);

    double max_abs = 0.0, min_abs = 0.0;
    for (double lam : eig.values) max_abs = std::max(max_abs, std::fabs(lam));
    min_abs = std::fabs(eig.values[0]);
    for (double lam : eig.values) min_abs = std::min(min_abs, std::fabs(lam));

    out.condition = (min_abs > 0.0 && max_abs > 0.0)
                        ? max_abs / min_abs
                        : std::numeric_limits<double>::infinity();
    // A negative eigenvalue beyond roundoff means the input was not PSD.
    if (max_abs <= 0.0 || eig.values[0] < -1e-8 * max_abs || !(out.condition < cond_max)) {
        out.ok = false;
        return out;
    }

    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double sum = 0.0;
            for (int k = 0; k < 4; ++k) {
                sum += eig.vectors[i][k] * eig.vectors[j][k] / eig.values[k];
            }
            if (!std::isfinite(sum)) {
                // Subnormal eigenvalues can pass the condition test yet
                // overflow on inversion; that is still a singular matrix.
                out.ok = false;
                return out;
            }
            out.inverse[i][j] = sum;
        }
    }
    out.ok = true;
    return out;
}

std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    if (x.size() != y.size() || x.size() <= static_cast<std::size_t>(degree)) {
        throw DomainError("polyfit: need more points than the polynomial degree");
    }
    const int n = degree + 1;
    // Normal equations: small systems only (degree <= 3 in this project).
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t s = 0; s < x.size(); ++s) {
        std::vector<double> pow_x(2 * n - 1, 1.0);
        for (int i = 1; i < 2 * n - 1; ++i) pow_x[i] = pow_x[i - 1] * x[s];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a[i][j] += pow_x[i + j];
            a[i][n] += pow_x[i] * y[s];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (a[col][col] == 0.0) throw NumericError("polyfit: singular normal equations");
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> coeffs(n);
    for (int i = 0; i < n; ++i) coeffs[i] = a[i][n] / a[i][i];
    return coeffs;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& coeffs) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) {
        double fit = 0.0, px = 1.0;
        for (double c : coeffs) {
            fit += c * px;
            px *= x[s];
        }
        ss_res += (y[s] - fit) * (y[s] - fit);
        ss_tot += (y[s] - mean) * (y[s] - mean);
    }
    if (ss_tot == 0.0) return 1.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace rss_sentry
