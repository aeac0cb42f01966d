#pragma once

#include "ksteady/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

namespace ksteady {

/// Radial mesh on [0, r0], geometrically graded toward the boundary layer.
struct RadialGrid {
    std::vector<double> nodes;  ///< strictly increasing, nodes.front()=0, nodes.back()=r0
    double r0 = 1.0;
    double layer_width = 0.0;  ///< eps used for grading

    std::size_t size() const { return nodes.size(); }

    std::size_t locate(double r) const {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
        std::size_t i = (it == nodes.begin()) ? 0 : std::size_t(it - nodes.begin()) - 1;
        return std::min(i, nodes.size() - 2);
    }
};

/// Build a grid with spacing <= eps/per_layer at the boundary, geometric
/// growth (ratio <= 1.2) toward the interior and target outer spacing r0/n_outer.
inline RadialGrid build_graded_grid(double r0, double eps, int n_outer = 600,
                                    int per_layer = 48) {
    if (!(r0 > 0.0)) throw ParameterError("build_graded_grid: r0 must be positive");
    if (!(eps > 0.0) || !(eps <= r0 / 10.0))
        throw ParameterError("build_graded_grid: require 0 < eps < r0/10");
    if (per_layer < 1 || n_outer < 8)
        throw ParameterError("build_graded_grid: per_layer >= 1 and n_outer >= 8 required");

    const double h_start = std::min(eps / per_layer, eps / 8.0);
    const double h_outer = r0 / n_outer;
    const double zone_cap = std::min(eps / 8.0, h_outer);
    const double growth = 1.18;

    // spacings measured from r0 inward, then rescaled to land exactly on 0
    std::vector<double> spacing;
    double dist = 0.0;
    double h = std::min(h_start, zone_cap);
    while (dist < r0) {
        spacing.push_back(h);
        dist += h;
        const double cap = (dist < 12.0 * eps) ? zone_cap : h_outer;
        h = std::min(h * growth, cap);
    }
    const double scale = r0 / dist;
    for (double& s : spacing) s *= scale;

    RadialGrid g;
    g.r0 = r0;
    g.layer_width = eps;
    g.nodes.resize(spacing.size() + 1);
    g.nodes.back() = r0;
    double acc = 0.0;
    for (std::size_t k = 0; k < spacing.size(); ++k) {
        acc += spacing[k];
        g.nodes[spacing.size() - 1 - k] = r0 - acc;
    }
    g.nodes.front() = 0.0;
    return g;
}

/// Throw unless the grid honors its structural invariants.
inline void validate_grid(const RadialGrid& g) {
    if (g.nodes.size() < 3) throw ParameterError("RadialGrid: too few nodes");
    if (g.nodes.front() != 0.0 || g.nodes.back() != g.r0)
        throw ParameterError("RadialGrid: endpoints must be 0 and r0");
    for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i)
        if (!(g.nodes[i + 1] > g.nodes[i]))
            throw ParameterError("RadialGrid: nodes must be strictly increasing");
    for (std::size_t i = 0; i + 2 < g.nodes.size(); ++i) {
        const double h0 = g.nodes[i + 1] - g.nodes[i];
        const double h1 = g.nodes[i + 2] - g.nodes[i + 1];
        const double ratio = std::max(h0 / h1, h1 / h0);
        if (ratio > 1.2 * (1.0 + 1e-12))
            throw ParameterError("RadialGrid: spacing ratio above 1.2");
    }
    if (g.layer_width > 0.0) {
        const double lo = g.r0 - 10.0 * g.layer_width;
        for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
            if (g.nodes[i] >= lo && g.nodes[i + 1] - g.nodes[i] > g.layer_width / 8.0 * (1.0 + 1e-12))
                throw ParameterError("RadialGrid: layer not resolved by 8 nodes per eps");
        }
    }
}

/// Values attached to the nodes of a shared grid.
struct GridFunction {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const RadialGrid> g)
        : grid(std::move(g)), values(grid->size(), 0.0) {}
    GridFunction(std::shared_ptr<const RadialGrid> g, std::vector<double> v)
        : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid->size())
            throw ParameterError("GridFunction: values/nodes size mismatch");
    }

    std::size_t size() const { return values.size(); }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Local cubic Lagrange interpolation (exact at nodes).
    double eval(double r) const {
        const auto& x = grid->nodes;
        if (r < x.front() - 1e-12 || r > x.back() + 1e-12)
            throw ParameterError("GridFunction: evaluation outside grid");
        r = std::clamp(r, x.front(), x.back());
        std::size_t i = grid->locate(r);
        // 4-point stencil around the interval [i, i+1]
        std::size_t lo = (i == 0) ? 0 : i - 1;
        if (lo + 3 >= x.size()) lo = x.size() - 4;
        double result = 0.0;
        for (std::size_t a = lo; a < lo + 4; ++a) {
            double w = 1.0;
            for (std::size_t b = lo; b < lo + 4; ++b)
                if (b != a) w *= (r - x[b]) / (x[a] - x[b]);
            result += w * values[a];
        }
        return result;
    }
};

} // namespace ksteady
