// Test-only oracles, independent of the library's computational paths.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Composite Simpson rule with n panels (n even).
template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / double(n);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) acc += f(a + h * double(i)) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Composite trapezoid rule with n panels.
template <class F>
double trapezoid(F&& f, double a, double b, std::size_t n) {
    const double h = (b - a) / double(n);
    double acc = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < n; ++i) acc += f(a + h * double(i));
    return acc * h;
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        if (std::abs(A[k][k]) < 1e-300) throw std::runtime_error("dense_solve: singular");
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

/// Modified Bessel functions of the first kind by power series (|x| small).
inline double bessel_i0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= q / (double(k) * double(k));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

inline double bessel_i1(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= q / (double(k) * double(k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/// Five-point central second derivative.
template <class F>
double fd_second(F&& f, double x, double d) {
    return (-f(x - 2 * d) + 16.0 * f(x - d) - 30.0 * f(x) + 16.0 * f(x + d) - f(x + 2 * d)) /
           (12.0 * d * d);
}

/// Five-point central first derivative.
template <class F>
double fd_first(F&& f, double x, double d) {
    return (-f(x + 2 * d) + 8.0 * f(x + d) - 8.0 * f(x - d) + f(x - 2 * d)) / (12.0 * d);
}

} // namespace oracles
