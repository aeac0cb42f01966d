#pragma once

#include "ksteady/corrections.hpp"
#include "ksteady/grid.hpp"
#include "ksteady/layer.hpp"
#include "ksteady/outer.hpp"
#include "ksteady/projections.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

namespace ksteady {

/// Matched constants tying the layer expansion to the outer amplitude:
///   a₁ = A₁ = √2/U'(r₀),  a₂ = A₂ = (ln4/U'(r₀) - 2(N-1)/r₀)/U'(r₀).
///
/// The ε-order pair (a₃, A₃) must cancel both the ε-constant and the ε(r-r₀)
/// content of u₁ - u₃ in the interface. Beyond ν₂ and ζ₁ this involves the
/// tail constants that the projections pick up when the layer profile's
/// exponential tail is integrated across the interface:
///   the α projection contributes 2(N-1)L∞/r₀ · ε  (constant order) and
///   -2L∞(1+(N-1)(N-2)/r₀²) · ε(r-r₀)  (linear order), with
///   L∞ = lim ∫₀ˢ ln(1+e^{√2σ})dσ = -π²/(12√2); the β projection contributes
///   -(N-1)ν₂/r₀ · ε(r-r₀). Solving the two matching equations gives
///   A₃ = [ζ₁ - 2L∞(1+(N-1)(N-2)/r₀²) - (N-1)ν₂/r₀] / U'(r₀),
///   a₃ = A₃ - ν₂ - 2(N-1)L∞/r₀.
struct MatchingConstants {
    int N = 2;
    double r0 = 1.0;
    double uprime_r0 = 0.0;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
    double A1 = 0.0, A2 = 0.0, A3 = 0.0;
    double eta = 0.8;  ///< interface-width exponent, delta = eps^eta
};

inline MatchingConstants compute_constants(const ProblemParams& params, const OuterSolution& outer,
                                           const CorrectionSet& corrections, double eta) {
    params.validate();
    const double up = outer.uprime_r0();
    if (!(up > 0.0)) throw ParameterError("compute_constants: invalid outer solution, U'(r0) <= 0");
    if (!(eta > 2.0 / 3.0) || !(eta < 1.0))
        throw ParameterError("compute_constants: eta must lie in (2/3, 1)");

    MatchingConstants c;
    c.N = params.N;
    c.r0 = params.r0;
    c.uprime_r0 = up;
    c.eta = eta;
    c.a1 = kSqrt2 / up;
    c.A1 = c.a1;
    c.a2 = (std::log(4.0) / up - 2.0 * (params.N - 1.0) / params.r0) / up;
    c.A2 = c.a2;
    const double n1 = (params.N - 1.0) / params.r0;
    const double l_inf = LayerCalculus::instance().log_tail_limit();
    const double lin_tail = -2.0 * l_inf * (1.0 + (params.N - 1.0) * (params.N - 2.0) /
                                                      (params.r0 * params.r0));
    c.A3 = (corrections.zeta1 + lin_tail - n1 * corrections.nu2) / up;
    c.a3 = c.A3 - corrections.nu2 - 2.0 * n1 * l_inf;
    return c;
}

/// λ(ε) = 4/ε² · exp(-(a₁/ε + a₂ + a₃ ε)).
inline double log_lambda_of_eps(double eps, const MatchingConstants& c) {
    if (!(eps > 0.0)) throw ParameterError("lambda_of_eps: eps must be positive");
    return std::log(4.0) - 2.0 * std::log(eps) - (c.a1 / eps + c.a2 + c.a3 * eps);
}

inline double lambda_of_eps(double eps, const MatchingConstants& c) {
    return std::exp(log_lambda_of_eps(eps, c));
}

/// Invert the concentration relation: solve ln(4/ε²) - lnλ = a₁/ε + a₂ + a₃ε
/// for the small root ε ∈ (0, 1). Throws DomainError when λ is too large.
inline double eps_of_lambda(double lambda, const MatchingConstants& c) {
    if (!(lambda > 0.0)) throw ParameterError("eps_of_lambda: lambda must be positive");
    const double log_lambda = std::log(lambda);
    auto g = [&](double e) { return log_lambda_of_eps(e, c) - log_lambda; };

    // g -> -inf as eps -> 0+ and peaks at eps*; the physical branch is the
    // small root left of eps*, where lambda increases with eps.
    double eps_star = 1.0;
    const double disc = 1.0 + c.a3 * c.a1;
    if (c.a3 != 0.0 && disc > 0.0) {
        const double root = (-1.0 + std::sqrt(disc)) / c.a3;
        if (std::isfinite(root) && root > 0.0) eps_star = std::min(root, 1.0);
    }
    if (!(g(eps_star) >= 0.0))
        throw DomainError("eps_of_lambda: lambda too large, no concentration parameter in (0,1)");

    double lo = std::min(1e-8, 0.5 * eps_star), hi = eps_star;
    while (g(lo) >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) throw DomainError("eps_of_lambda: bracketing failed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double e = 0.5 * (lo + hi);
    if (std::abs(g(e)) > 1e-12)
        throw DomainError("eps_of_lambda: root refinement failed");
    return e;
}

/// C² cutoff: χ ≡ 1 on (r₀-δ, r₀], χ ≡ 0 on [0, r₀-2δ], quintic smoothstep between.
struct Cutoff {
    double chi, dchi, d2chi;
};

inline Cutoff cutoff_chi(double r, double r0, double delta) {
    if (!(delta > 0.0)) throw ParameterError("cutoff_chi: delta must be positive");
    const double t = (r - (r0 - 2.0 * delta)) / delta;
    if (t <= 0.0) return {0.0, 0.0, 0.0};
    if (t >= 1.0) return {1.0, 0.0, 0.0};
    const double s = ((6.0 * t - 15.0) * t + 10.0) * t * t * t;
    const double sp = 30.0 * t * t * (t - 1.0) * (t - 1.0);
    const double spp = 60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
    return {s, sp / delta, spp / (delta * delta)};
}

/// The glued approximate solution ū for one value of ε:
///   u₁ = w_ε - lnλ + α_ε + ε v + β_ε + ε² z   near the boundary,
///   u₃ = (A₁/ε + A₂ + A₃ε) U                  in the interior,
///   u₂ = χ u₁ + (1-χ) u₃                      on the interface [r₀-2δ, r₀-δ].
class ApproxSolution {
public:
    ApproxSolution(std::shared_ptr<const OuterSolution> outer,
                   std::shared_ptr<const CorrectionSet> corrections,
                   const MatchingConstants& consts, double eps)
        : outer_(std::move(outer)),
          corr_(std::move(corrections)),
          consts_(consts),
          eps_(eps) {
        const ProblemParams& p = outer_->params();
        if (!(eps > 0.0) || !(eps <= p.r0 / 10.0))
            throw ParameterError("ApproxSolution: require 0 < eps < r0/10");
        delta_ = std::pow(eps, consts.eta);
        log_lambda_ = log_lambda_of_eps(eps, consts);
        lambda_ = std::exp(log_lambda_);
        const double span = std::min(0.95 * p.r0, std::max(2.5 * delta_, 14.0 * eps));
        proj_ = LayerProjection(p, eps, log_lambda_, corr_->v, p.r0 - span);
        amp_ = consts.A1 / eps + consts.A2 + consts.A3 * eps;
    }

    double eps() const { return eps_; }
    double lambda() const { return lambda_; }
    double log_lambda() const { return log_lambda_; }
    double delta() const { return delta_; }
    double amplitude() const { return amp_; }
    const MatchingConstants& constants() const { return consts_; }
    const OuterSolution& outer() const { return *outer_; }
    const CorrectionSet& corrections() const { return *corr_; }
    const ProblemParams& params() const { return outer_->params(); }

    double u1(double r) const {
        const double r0 = params().r0;
        const double s = (r - r0) / eps_;
        const WEpsValues wv = eval_w_eps(r, eps_, r0);
        return wv.w - log_lambda_ + proj_.alpha(r) + eps_ * corr_->v(s) + proj_.beta(r) +
               eps_ * eps_ * corr_->z(s);
    }

    double u1_prime(double r) const {
        const double r0 = params().r0;
        const double s = (r - r0) / eps_;
        const WEpsValues wv = eval_w_eps(r, eps_, r0);
        return wv.wp + proj_.alpha_prime(r) + corr_->v.deriv(s) + proj_.beta_prime(r) +
               eps_ * corr_->z.deriv(s);
    }

    double u3(double r) const { return amp_ * outer_->value(r); }
    double u3_prime(double r) const { return amp_ * outer_->derivative(r); }

    Cutoff chi(double r) const { return cutoff_chi(r, params().r0, delta_); }

    double ubar(double r) const {
        const double r0 = params().r0;
        if (r > r0 - delta_) return u1(r);
        if (r < r0 - 2.0 * delta_) return u3(r);
        const double x = chi(r).chi;
        return x * u1(r) + (1.0 - x) * u3(r);
    }

    GridFunction sample(std::shared_ptr<const RadialGrid> grid) const {
        GridFunction f(grid);
        for (std::size_t i = 0; i < grid->size(); ++i) f.values[i] = ubar(grid->nodes[i]);
        return f;
    }

private:
    std::shared_ptr<const OuterSolution> outer_;
    std::shared_ptr<const CorrectionSet> corr_;
    MatchingConstants consts_;
    double eps_, delta_ = 0.0, lambda_ = 0.0, log_lambda_ = 0.0, amp_ = 0.0;
    LayerProjection proj_;
};

/// Sampled sup of |u₁-u₃| and |u₁'-u₃'| over the interface [r₀-2δ, r₀-δ].
struct GluingMismatch {
    double sup_value = 0.0;
    double sup_derivative = 0.0;
};

inline GluingMismatch gluing_mismatch(const ApproxSolution& approx, int n_samples = 256) {
    if (n_samples < 2) throw ParameterError("gluing_mismatch: need at least 2 samples");
    const double r0 = approx.params().r0;
    const double d = approx.delta();
    GluingMismatch out;
    for (int k = 0; k < n_samples; ++k) {
        const double r = (r0 - 2.0 * d) + d * double(k) / double(n_samples - 1);
        out.sup_value = std::max(out.sup_value, std::abs(approx.u1(r) - approx.u3(r)));
        out.sup_derivative =
            std::max(out.sup_derivative, std::abs(approx.u1_prime(r) - approx.u3_prime(r)));
    }
    return out;
}

} // namespace ksteady
