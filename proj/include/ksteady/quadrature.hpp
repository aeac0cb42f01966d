#pragma once

#include "ksteady/errors.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

namespace ksteady {

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEstimate {
    double a, b, integral, error;
};

template <class F>
PanelEstimate gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double ik = 0.0, ig = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kGK15Nodes[i];
        double fsum;
        if (i == 7) {
            fsum = f(c);
        } else {
            fsum = f(c - x) + f(c + x);
        }
        ik += kGK15WeightsK[i] * fsum;
        if (i == 7)
            ig += kGK15WeightsG[3] * fsum;
        else if (i % 2 == 1)
            ig += kGK15WeightsG[i / 2] * fsum;
    }
    ik *= h;
    ig *= h;
    return {a, b, ik, std::abs(ik - ig)};
}

} // namespace detail

/// Adaptive quadrature of f over [a, b] (orientation-aware) with absolute
/// tolerance semantics |result - exact| <= tol * (1 + |exact|).
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw ParameterError("integrate_adaptive: tol must be positive");
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    auto cmp = [](const detail::PanelEstimate& x, const detail::PanelEstimate& y) {
        return x.error < y.error;
    };
    std::priority_queue<detail::PanelEstimate, std::vector<detail::PanelEstimate>, decltype(cmp)>
        queue(cmp);

    auto first = detail::gk15(f, a, b);
    double total = first.integral;
    double err = first.error;
    queue.push(first);

    const std::size_t max_panels = 20000;
    std::size_t panels = 1;
    while (err > tol * (1.0 + std::abs(total))) {
        if (panels >= max_panels || queue.empty())
            throw QuadratureError("integrate_adaptive: did not converge", sign * total);
        auto worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureError("integrate_adaptive: interval underflow", sign * total);
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++panels;
    }
    return sign * total;
}

} // namespace ksteady
