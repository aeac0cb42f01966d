#pragma once

#include "ksteady/chebyshev.hpp"
#include "ksteady/corrections.hpp"
#include "ksteady/layer.hpp"
#include "ksteady/outer.hpp"
#include "ksteady/quadrature.hpp"

#include <cmath>
#include <vector>

namespace ksteady {

namespace detail {

// RHS of the alpha projection problem: τ^{N-1} [ (N-1)/τ w'_ε - w_ε + ln λ ].
struct AlphaIntegrand {
    double eps, log_lambda, r0;
    int N;
    double operator()(double tau) const {
        const WEpsValues wv = eval_w_eps(tau, eps, r0);
        return std::pow(tau, N - 1) * ((N - 1) / tau * wv.wp - wv.w + log_lambda);
    }
};

// Panel edges on [r_lo, r0], graded at layer scale near r0.
inline std::vector<double> radial_ladder(double r_lo, double r0, double eps) {
    std::vector<double> edges{r0};
    double d = 0.35 * eps;
    while (r0 - edges.back() < (r0 - r_lo)) {
        double next = edges.back() - d;
        if (next <= r_lo + 0.25 * d) {
            edges.push_back(r_lo);
            break;
        }
        edges.push_back(next);
        d *= 1.35;
    }
    return edges;  // descending; PiecewiseCheb::fit sorts
}

} // namespace detail

/// Exact first projection,
///   α_ε(r) = -∫_{r0}^r t^{1-N} ∫_{r0}^t τ^{N-1} [(N-1)/τ w'_ε - w_ε + lnλ] dτ dt,
/// by nested adaptive quadrature. Satisfies α_ε(r0) = α_ε'(r0) = 0.
inline double eval_alpha_eps_exact(double r, double eps, double lambda,
                                   const ProblemParams& params, double quad_tol = 1e-10) {
    if (!(r > 0.0) || r > params.r0 * (1.0 + 1e-12))
        throw ParameterError("eval_alpha_eps_exact: r must lie in (0, r0]");
    const detail::AlphaIntegrand m{eps, std::log(lambda), params.r0, params.N};
    const double inner_tol = 0.05 * quad_tol;
    auto outer = [&](double t) {
        const double J = integrate_adaptive(m, params.r0, t, inner_tol);
        return J / std::pow(t, params.N - 1);
    };
    return -integrate_adaptive(outer, params.r0, r, quad_tol);
}

/// Exact second projection,
///   β_ε(r) = -(N-1) ∫_r^{r0} t^{1-N} ∫_t^{r0} τ^{N-2} v'((τ-r0)/ε) dτ dt.
inline double eval_beta_eps_exact(double r, double eps, const ProblemParams& params,
                                  const CorrectionFunction& v, double quad_tol = 1e-10) {
    if (!(r > 0.0) || r > params.r0 * (1.0 + 1e-12))
        throw ParameterError("eval_beta_eps_exact: r must lie in (0, r0]");
    const double r0 = params.r0;
    const int N = params.N;
    const double inner_tol = 0.05 * quad_tol;
    auto inner = [&](double tau) { return std::pow(tau, N - 2) * v.deriv((tau - r0) / eps); };
    auto outerf = [&](double t) {
        const double Q = integrate_adaptive(inner, t, r0, inner_tol);
        return Q / std::pow(t, N - 1);
    };
    return -(N - 1.0) * integrate_adaptive(outerf, r, r0, quad_tol);
}

/// Panelized α_ε and β_ε on [r_lo, r0] for fast assembly; agrees with the
/// exact nested quadratures to near machine precision.
class LayerProjection {
public:
    LayerProjection() = default;

    LayerProjection(const ProblemParams& params, double eps, double log_lambda,
                    const CorrectionFunction& v, double r_lo)
        : r0_(params.r0), N_(params.N) {
        const auto edges = detail::radial_ladder(r_lo, params.r0, eps);
        const int deg = detail::kLayerFitDegree;

        const detail::AlphaIntegrand m{eps, log_lambda, params.r0, params.N};
        M_ = cheb::PiecewiseCheb::fit(m, edges, deg).antiderivative(r0_);
        auto g = [this](double t) { return M_(t) / std::pow(t, N_ - 1); };
        A_ = cheb::PiecewiseCheb::fit(g, edges, deg).antiderivative(r0_);

        auto p = [&](double tau) { return std::pow(tau, N_ - 2) * v.deriv((tau - r0_) / eps); };
        P_ = cheb::PiecewiseCheb::fit(p, edges, deg).antiderivative(r0_);
        auto bq = [this](double t) { return -P_(t) / std::pow(t, N_ - 1); };
        B_ = cheb::PiecewiseCheb::fit(bq, edges, deg).antiderivative(r0_);
    }

    double r_lo() const { return A_.xmin(); }

    double alpha(double r) const { return -A_(r); }
    double alpha_prime(double r) const { return -M_(r) / std::pow(r, N_ - 1); }
    double beta(double r) const { return (N_ - 1.0) * B_(r); }
    double beta_prime(double r) const { return -(N_ - 1.0) * P_(r) / std::pow(r, N_ - 1); }

private:
    double r0_ = 1.0;
    int N_ = 2;
    cheb::PiecewiseCheb M_, A_, P_, B_;
};

} // namespace ksteady
