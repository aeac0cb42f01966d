#pragma once

#include "ksteady/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace ksteady {

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Result of an adaptive integration: accepted steps plus dense evaluation.
/// Dense output re-integrates within a stored step with fixed RK4 substeps,
/// which keeps the interpolation error well below the step-control error.
class OdeTrajectory {
public:
    OdeTrajectory(OdeRhs rhs, std::vector<double> times, std::vector<std::vector<double>> states)
        : rhs_(std::move(rhs)), t_(std::move(times)), y_(std::move(states)) {}

    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    std::size_t dim() const { return y_.front().size(); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& state(std::size_t i) const { return y_[i]; }
    const std::vector<double>& end_state() const { return y_.back(); }

    std::vector<double> eval(double t) const {
        const double slack = 1e-12 * (t_end() - t_begin()) + 1e-300;
        if (t < t_begin() - slack || t > t_end() + slack)
            throw ParameterError("OdeTrajectory: evaluation outside span");
        t = std::clamp(t, t_begin(), t_end());
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        std::size_t i = (it == t_.begin()) ? 0 : std::size_t(it - t_.begin()) - 1;
        i = std::min(i, t_.size() - 2);
        const double dt = t - t_[i];
        std::vector<double> y = y_[i];
        if (dt == 0.0) return y;
        rk4_advance(y, t_[i], dt);
        return y;
    }

    double eval(double t, std::size_t comp) const { return eval(t)[comp]; }

private:
    void rk4_advance(std::vector<double>& y, double t0, double span) const {
        const int m = 8;
        const double h = span / m;
        const std::size_t n = y.size();
        std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
        double t = t0;
        for (int step = 0; step < m; ++step) {
            rhs_(t, y, k1);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
            rhs_(t + 0.5 * h, tmp, k2);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
            rhs_(t + 0.5 * h, tmp, k3);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h * k3[j];
            rhs_(t + h, tmp, k4);
            for (std::size_t j = 0; j < n; ++j)
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            t += h;
        }
    }

    OdeRhs rhs_;
    std::vector<double> t_;
    std::vector<std::vector<double>> y_;
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double dp_b[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                   -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double dp_e[7] = {71.0 / 57600,        0.0,         -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

} // namespace detail

struct IvpOptions {
    double initial_step = 0.0;  ///< 0 = automatic
    double max_step = 0.0;      ///< 0 = span
    std::size_t max_steps = 2000000;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(t, y) over [a, b], a < b.
inline OdeTrajectory integrate_ivp(OdeRhs rhs, std::vector<double> y0, double a, double b,
                                   double tol, const IvpOptions& opt = {}) {
    if (!(b > a)) throw ParameterError("integrate_ivp: span must satisfy a < b");
    if (!(tol > 0.0)) throw ParameterError("integrate_ivp: tol must be positive");
    const std::size_t n = y0.size();
    if (n == 0) throw ParameterError("integrate_ivp: empty state");

    const double span = b - a;
    const double hmax = opt.max_step > 0.0 ? opt.max_step : span;
    double h = opt.initial_step > 0.0 ? opt.initial_step : std::min(hmax, span / 100.0);

    std::vector<double> times{a};
    std::vector<std::vector<double>> states{y0};

    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> y = y0, ytmp(n), ynew(n);
    double t = a;

    rhs(t, y, k[0]);
    std::size_t steps = 0;
    while (t < b) {
        if (++steps > opt.max_steps)
            throw StiffnessError("integrate_ivp: step budget exhausted");
        h = std::min({h, hmax, b - t});
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw StiffnessError("integrate_ivp: step size underflow");

        for (int stage = 1; stage < 7; ++stage) {
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int m = 0; m < stage; ++m) acc += detail::dp_a[stage][m] * k[std::size_t(m)][j];
                ytmp[j] = y[j] + h * acc;
            }
            rhs(t + detail::dp_c[stage] * h, ytmp, k[std::size_t(stage)]);
        }
        // error-per-unit-step control keeps the global error proportional to tol
        double errnorm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0, ev = 0.0;
            for (int m = 0; m < 7; ++m) {
                acc += detail::dp_b[m] * k[std::size_t(m)][j];
                ev += detail::dp_e[m] * k[std::size_t(m)][j];
            }
            ynew[j] = y[j] + h * acc;
            const double sc = tol * (1.0 + std::max(std::abs(y[j]), std::abs(ynew[j])));
            const double r = ev / sc;
            errnorm += r * r;
        }
        errnorm = std::sqrt(errnorm / double(n));

        if (errnorm <= 1.0) {
            t += h;
            y = ynew;
            k[0] = k[6];  // FSAL
            times.push_back(t);
            states.push_back(y);
        }
        // on rejection k[0] still holds f(t, y); only the step size changes
        const double fac = std::clamp(0.9 * std::pow(std::max(errnorm, 1e-12), -0.25), 0.2, 1.6);
        h *= fac;
    }
    return OdeTrajectory(std::move(rhs), std::move(times), std::move(states));
}

} // namespace ksteady
