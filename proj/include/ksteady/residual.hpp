#pragma once

#include "ksteady/errors.hpp"
#include "ksteady/grid.hpp"
#include "ksteady/outer.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ksteady {

/// Equation defect R(u) = -u'' - (N-1)/r u' + u - λ e^u on the grid, by
/// second-order central differences on the nonuniform stencil. Neumann ends:
/// ghost reflection at r0, and the regularized operator -N u''(0) + u - λe^u
/// at the origin (L'Hopital limit of the radial Laplacian).
inline GridFunction residual_log(const GridFunction& u, double log_lambda,
                                 const ProblemParams& params) {
    const auto& x = u.grid->nodes;
    const std::size_t n = x.size();
    if (n < 3) throw ParameterError("residual: grid too small");
    GridFunction R(u.grid);

    auto source = [&](std::size_t i) { return std::exp(log_lambda + u.values[i]); };

    {
        const double h0 = x[1] - x[0];
        const double upp = 2.0 * (u.values[1] - u.values[0]) / (h0 * h0);
        R.values[0] = -params.N * upp + u.values[0] - source(0);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        const double denom = hm * hp * (hm + hp);
        const double upp =
            2.0 * (hm * u.values[i + 1] - (hm + hp) * u.values[i] + hp * u.values[i - 1]) / denom;
        const double up =
            (hm * hm * u.values[i + 1] + (hp * hp - hm * hm) * u.values[i] -
             hp * hp * u.values[i - 1]) /
            denom;
        R.values[i] = -upp - (params.N - 1.0) / x[i] * up + u.values[i] - source(i);
    }
    {
        const double h = x[n - 1] - x[n - 2];
        const double upp = 2.0 * (u.values[n - 2] - u.values[n - 1]) / (h * h);
        R.values[n - 1] = -upp + u.values[n - 1] - source(n - 1);
    }
    return R;
}

inline GridFunction residual(const GridFunction& u, double lambda, const ProblemParams& params) {
    if (!(lambda > 0.0)) throw ParameterError("residual: lambda must be positive");
    return residual_log(u, std::log(lambda), params);
}

/// Trapezoid rule of |f| in the measure dr on (0, r0).
inline double l1_norm(const GridFunction& f) {
    const auto& x = f.grid->nodes;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        acc += 0.5 * (x[i + 1] - x[i]) * (std::abs(f.values[i]) + std::abs(f.values[i + 1]));
    return acc;
}

/// L1 norms split by region: layer (r0-δ, r0], interface [r0-2δ, r0-δ],
/// outer [0, r0-2δ). Intervals are assigned by midpoint, so the parts sum
/// to the same trapezoid total.
struct RegionalL1 {
    double layer = 0.0, interface_zone = 0.0, outer = 0.0, total = 0.0;
};

inline RegionalL1 regional_l1(const GridFunction& f, double delta) {
    const auto& x = f.grid->nodes;
    const double r0 = f.grid->r0;
    RegionalL1 out;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double part =
            0.5 * (x[i + 1] - x[i]) * (std::abs(f.values[i]) + std::abs(f.values[i + 1]));
        const double mid = 0.5 * (x[i] + x[i + 1]);
        if (mid > r0 - delta)
            out.layer += part;
        else if (mid >= r0 - 2.0 * delta)
            out.interface_zone += part;
        else
            out.outer += part;
        out.total += part;
    }
    return out;
}

/// Least-squares slope of log l1 versus log eps, minus one. Positive means
/// the residual shrinks faster than eps.
inline double scaling_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 4) throw ParameterError("scaling_fit: need at least 4 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].second > 0.0)) throw DomainError("scaling_fit: non-positive norm");
        if (i > 0 && !(points[i].first < points[i - 1].first))
            throw ParameterError("scaling_fit: eps must be strictly decreasing");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = double(points.size());
    for (const auto& [eps, l1] : points) {
        const double lx = std::log(eps), ly = std::log(l1);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return slope - 1.0;
}

/// One row of a residual sweep.
struct ResidualReport {
    double eps = 0.0, lambda = 0.0;
    double l1_layer = 0.0, l1_interface = 0.0, l1_outer = 0.0, l1_total = 0.0;
};

} // namespace ksteady
