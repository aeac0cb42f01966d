#pragma once

#include "ksteady/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace ksteady::cheb {

/// Chebyshev series on a single interval [a, b]; c[0] carries full weight.
struct Panel {
    double a = -1.0, b = 1.0;
    std::vector<double> c;

    double to_local(double x) const { return (2.0 * x - a - b) / (b - a); }

    double eval(double x) const {
        const double t = to_local(x);
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t k = c.size(); k-- > 1;) {
            const double tmp = 2.0 * t * b1 - b2 + c[k];
            b2 = b1;
            b1 = tmp;
        }
        return t * b1 - b2 + c[0];
    }

    Panel derivative() const {
        const std::size_t n = c.size();
        Panel d;
        d.a = a;
        d.b = b;
        if (n <= 1) {
            d.c = {0.0};
            return d;
        }
        std::vector<double> w(n + 1, 0.0);
        for (std::size_t k = n - 1; k >= 1; --k) {
            w[k - 1] = w[k + 1] + 2.0 * double(k) * c[k];
            if (k == 1) break;
        }
        w[0] *= 0.5;
        const double s = 2.0 / (b - a);
        d.c.assign(n - 1, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) d.c[k] = w[k] * s;
        return d;
    }

    /// Antiderivative anchored so that F(a) = 0.
    Panel antiderivative() const {
        const std::size_t n = c.size();
        Panel F;
        F.a = a;
        F.b = b;
        F.c.assign(n + 1, 0.0);
        auto cc = [&](std::size_t k) -> double { return k < n ? c[k] : 0.0; };
        const double s = 0.5 * (b - a);
        F.c[1] = s * (cc(0) - 0.5 * cc(2));
        for (std::size_t k = 2; k <= n; ++k)
            F.c[k] = s * (cc(k - 1) - cc(k + 1)) / (2.0 * double(k));
        double at_a = 0.0;
        double sign = -1.0;
        for (std::size_t k = 1; k <= n; ++k) {
            at_a += sign * F.c[k];
            sign = -sign;
        }
        F.c[0] = -at_a;
        return F;
    }
};

template <class F>
Panel fit_panel(F&& f, double a, double b, int degree) {
    const int n = degree;
    std::vector<double> fv(std::size_t(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const double t = std::cos(M_PI * j / n);
        const double x = 0.5 * (a + b) + 0.5 * (b - a) * t;
        fv[std::size_t(j)] = f(x);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.c.assign(std::size_t(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double s = 0.5 * fv[0];
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        s += 0.5 * sgn * fv[std::size_t(n)];
        for (int j = 1; j < n; ++j) s += fv[std::size_t(j)] * std::cos(M_PI * j * k / n);
        s *= 2.0 / n;
        if (k == 0 || k == n) s *= 0.5;
        p.c[std::size_t(k)] = s;
    }
    return p;
}

/// Piecewise Chebyshev representation over a partition; near machine precision
/// for functions analytic on each panel.
class PiecewiseCheb {
public:
    PiecewiseCheb() = default;

    template <class F>
    static PiecewiseCheb fit(F&& f, std::vector<double> edges, int degree) {
        if (edges.size() < 2) throw ParameterError("PiecewiseCheb: need at least 2 edges");
        std::sort(edges.begin(), edges.end());
        PiecewiseCheb pc;
        pc.edges_ = std::move(edges);
        pc.panels_.reserve(pc.edges_.size() - 1);
        for (std::size_t i = 0; i + 1 < pc.edges_.size(); ++i)
            pc.panels_.push_back(fit_panel(f, pc.edges_[i], pc.edges_[i + 1], degree));
        return pc;
    }

    double xmin() const { return edges_.front(); }
    double xmax() const { return edges_.back(); }
    bool empty() const { return panels_.empty(); }

    double eval(double x) const {
        const double slack = 1e-9 * (xmax() - xmin());
        if (x < xmin() - slack || x > xmax() + slack)
            throw ParameterError("PiecewiseCheb: evaluation outside range");
        x = std::clamp(x, xmin(), xmax());
        return panels_[locate(x)].eval(x);
    }
    double operator()(double x) const { return eval(x); }

    PiecewiseCheb derivative() const {
        PiecewiseCheb d;
        d.edges_ = edges_;
        d.panels_.reserve(panels_.size());
        for (const auto& p : panels_) d.panels_.push_back(p.derivative());
        return d;
    }

    /// Global antiderivative, continuous across panels, zero at `anchor`.
    PiecewiseCheb antiderivative(double anchor) const {
        PiecewiseCheb F;
        F.edges_ = edges_;
        F.panels_.reserve(panels_.size());
        double off = 0.0;
        for (const auto& p : panels_) {
            Panel q = p.antiderivative();
            q.c[0] += off;
            off = q.eval(p.b);
            F.panels_.push_back(std::move(q));
        }
        const double shift = F.eval(anchor);
        for (auto& q : F.panels_) q.c[0] -= shift;
        return F;
    }

private:
    std::size_t locate(double x) const {
        auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        std::size_t i = (it == edges_.begin()) ? 0 : std::size_t(it - edges_.begin()) - 1;
        return std::min(i, panels_.size() - 1);
    }

    std::vector<double> edges_;
    std::vector<Panel> panels_;
};

} // namespace ksteady::cheb
