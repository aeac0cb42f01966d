#pragma once

#include "ksteady/errors.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ksteady {

/// Tridiagonal matrix in banded storage. Row i couples x[i-1], x[i], x[i+1]
/// through lower[i], diag[i], upper[i]; lower[0] and upper[n-1] are unused.
struct Tridiagonal {
    std::vector<double> lower, diag, upper;

    std::size_t size() const { return diag.size(); }

    std::vector<double> apply(std::span<const double> x) const {
        const std::size_t n = size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += lower[i] * x[i - 1];
            if (i + 1 < n) s += upper[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }
};

namespace detail {

inline std::vector<double> tridiag_solve_once(const Tridiagonal& A, std::vector<double> rhs) {
    const std::size_t n = A.size();
    std::vector<double> low = A.lower, d = A.diag, u1 = A.upper, u2(n, 0.0);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        scale = std::max({scale, std::abs(d[i]), std::abs(low[i]), std::abs(u1[i])});
    if (scale == 0.0) throw SingularMatrixError("solve_banded: zero matrix");
    const double tiny = 1e-14 * scale;

    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(low[k + 1]) > std::abs(d[k])) {
            // swap rows k and k+1
            std::swap(d[k], low[k + 1]);
            std::swap(u1[k], d[k + 1]);
            std::swap(u2[k], u1[k + 1]);
            std::swap(rhs[k], rhs[k + 1]);
        }
        if (std::abs(d[k]) <= tiny)
            throw SingularMatrixError("solve_banded: near-singular pivot");
        const double m = low[k + 1] / d[k];
        d[k + 1] -= m * u1[k];
        u1[k + 1] -= m * u2[k];
        rhs[k + 1] -= m * rhs[k];
    }
    if (std::abs(d[n - 1]) <= tiny)
        throw SingularMatrixError("solve_banded: near-singular pivot");

    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / d[n - 1];
    if (n >= 2) x[n - 2] = (rhs[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t k = n; k-- > 0;) {
        if (k + 2 >= n) continue;
        x[k] = (rhs[k] - u1[k] * x[k + 1] - u2[k] * x[k + 2]) / d[k];
    }
    return x;
}

} // namespace detail

/// Solve A x = rhs with partial pivoting plus one step of iterative refinement.
inline std::vector<double> solve_banded(const Tridiagonal& A, const std::vector<double>& rhs) {
    const std::size_t n = A.size();
    if (rhs.size() != n) throw ParameterError("solve_banded: size mismatch");
    if (n == 0) return {};
    std::vector<double> x = detail::tridiag_solve_once(A, rhs);
    std::vector<double> Ax = A.apply(x);
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = rhs[i] - Ax[i];
    std::vector<double> dx = detail::tridiag_solve_once(A, std::move(res));
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
    return x;
}

} // namespace ksteady
