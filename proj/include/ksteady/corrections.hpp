#pragma once

#include "ksteady/chebyshev.hpp"
#include "ksteady/errors.hpp"
#include "ksteady/layer.hpp"
#include "ksteady/outer.hpp"
#include "ksteady/quadrature.hpp"
#include "ksteady/tolerances.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace ksteady {

namespace detail {

// Panel edges for all layer-scale fits. Graded: fine where e^w is active,
// coarse in the far field where everything is affine plus exponential tails.
inline std::vector<double> layer_ladder() {
    return {-46.0, -35.64, -26.14, -19.10, -13.89, -10.03, -7.17, -5.05,
            -3.48,  -2.32,  -1.46,  -0.82,  -0.35,  0.0,    0.35,  0.75};
}

inline constexpr int kLayerFitDegree = 22;

// ln(1 + e^{√2 σ}) without overflow on either side.
inline double log1p_exp_sqrt2(double s) {
    if (s <= 0.0) return std::log1p(std::exp(kSqrt2 * s));
    return kSqrt2 * s + std::log1p(std::exp(-kSqrt2 * s));
}

} // namespace detail

/// Antiderivatives of the layer profile w, built once and shared:
///   int_w(s)     = ∫₀ˢ w(σ) dσ
///   int_int_w(s) = ∫₀ˢ∫₀^σ w(ρ) dρ dσ
///   int_sw(s)    = ∫₀ˢ σ w(σ) dσ
/// Each reduces to elementary terms plus an integral of ln(1+e^{√2 σ}).
class LayerCalculus {
public:
    static const LayerCalculus& instance() {
        static const LayerCalculus self;
        return self;
    }

    double int_w(double s) const {
        const double ln4 = std::log(4.0);
        if (s < smin_) return ln4 * s + 0.5 * kSqrt2 * s * s - 2.0 * l_inf_;
        return ln4 * s + 0.5 * kSqrt2 * s * s - 2.0 * L_(s);
    }

    double int_int_w(double s) const {
        const double ln4 = std::log(4.0);
        const double l2 = (s < smin_) ? l2_min_ + l_inf_ * (s - smin_) : L2_(s);
        return 0.5 * ln4 * s * s + kSqrt2 * s * s * s / 6.0 - 2.0 * l2;
    }

    double int_sw(double s) const {
        const double ln4 = std::log(4.0);
        const double lm = (s < smin_) ? lm_inf_ : Lm_(s);
        return 0.5 * ln4 * s * s + kSqrt2 * s * s * s / 3.0 - 2.0 * lm;
    }

    /// lim_{s -> -inf} ∫₀ˢ ln(1+e^{√2 σ}) dσ = -π²/(12 √2); the tail constant
    /// that the integrated layer profile carries into the interface.
    double log_tail_limit() const { return l_inf_; }

private:
    LayerCalculus() {
        const auto edges = detail::layer_ladder();
        const int deg = detail::kLayerFitDegree;
        L_ = cheb::PiecewiseCheb::fit(detail::log1p_exp_sqrt2, edges, deg).antiderivative(0.0);
        Lm_ = cheb::PiecewiseCheb::fit(
                  [](double s) { return s * detail::log1p_exp_sqrt2(s); }, edges, deg)
                  .antiderivative(0.0);
        L2_ = L_.antiderivative(0.0);
        smin_ = edges.front();
        l_inf_ = L_(smin_);
        l2_min_ = L2_(smin_);
        lm_inf_ = Lm_(smin_);
    }

    cheb::PiecewiseCheb L_, L2_, Lm_;
    double smin_ = -46.0, l_inf_ = 0.0, l2_min_ = 0.0, lm_inf_ = 0.0;
};

/// First projection correction: α₁(s) = -(N-1)/r₀ ∫₀ˢ w + ½ a₁ s².
class Alpha1 {
public:
    Alpha1() = default;
    Alpha1(const ProblemParams& p, double a1) : n1_((p.N - 1) / p.r0), a1_(a1) {}

    double operator()(double s) const {
        return -n1_ * LayerCalculus::instance().int_w(s) + 0.5 * a1_ * s * s;
    }
    double deriv(double s) const { return -n1_ * eval_w(s).w + a1_ * s; }
    double a1() const { return a1_; }

private:
    double n1_ = 0.0, a1_ = 0.0;
};

/// Second projection correction (all five terms):
/// α₂(s) = ∫∫(w-ln4) + (N-1)(N-2)/r₀² ∫∫w + (N-1)/r₀² ∫σw - (N-1)a₁s³/(6r₀) + ½a₂s².
class Alpha2 {
public:
    Alpha2() = default;
    Alpha2(const ProblemParams& p, double a1, double a2)
        : N_(p.N), r0_(p.r0), a1_(a1), a2_(a2) {}

    double operator()(double s) const {
        const auto& lc = LayerCalculus::instance();
        const double iiw = lc.int_int_w(s);
        const double isw = lc.int_sw(s);
        const double d1 = iiw - 0.5 * std::log(4.0) * s * s;
        return d1 + (N_ - 1.0) * (N_ - 2.0) / (r0_ * r0_) * iiw + (N_ - 1.0) / (r0_ * r0_) * isw -
               (N_ - 1.0) / (6.0 * r0_) * a1_ * s * s * s + 0.5 * a2_ * s * s;
    }

private:
    double N_ = 2.0, r0_ = 1.0, a1_ = 0.0, a2_ = 0.0;
};

/// Solution Y of -Y'' - e^w Y = h e^w built from the explicit kernel
/// Y(t) = w'(t) ∫₀ᵗ (1/w'(s)²) ∫ₛ⁰ h w' e^w dz ds, with its far-field
/// slope and intercept from the kernel's s → -∞ asymptotics. Below the
/// panel range the evaluation continues along the affine asymptote.
struct CorrectionFunction {
    cheb::PiecewiseCheb phi;   ///< Φ(t) = ∫₀ᵗ F
    cheb::PiecewiseCheb fker;  ///< F(s), the kernel's inner ratio
    double slope = 0.0;
    double intercept = 0.0;
    double s_min = -46.0;

    double operator()(double s) const {
        if (s < s_min) return slope * s + intercept;
        return eval_w(s).wp * phi(s);
    }

    double deriv(double s) const {
        if (s < s_min) return slope;
        const WValues wv = eval_w(s);
        return -wv.ew * phi(s) + wv.wp * fker(s);
    }
};

/// Taylor data of the forcing at s = 0: {h(0), h'(0), h''(0)}.
using ForcingJet = std::array<double, 3>;

template <class H>
ForcingJet forcing_jet_fd(H&& h) {
    const double d = 0.05;
    const double h0 = h(0.0);
    const double h1 = (-h(2 * d) + 8.0 * h(d) - 8.0 * h(-d) + h(-2 * d)) / (12.0 * d);
    const double h2 =
        (-h(2 * d) + 16.0 * h(d) - 30.0 * h0 + 16.0 * h(-d) - h(-2 * d)) / (12.0 * d * d);
    return {h0, h1, h2};
}

/// Solve -Y'' - e^w Y = h e^w on the layer scale. h must be continuous with at
/// most polynomial growth toward -∞. The removable singularity of the kernel at
/// s = 0 (w'(0) = 0) is handled by a quadratic Taylor patch on |s| < 1e-3; the
/// intercept integrand's removable point is patched by its analytic limit.
template <class H>
CorrectionFunction solve_layer_linear(H&& h, double quad_tol, const ForcingJet& jet) {
    const auto edges = detail::layer_ladder();
    const int deg = detail::kLayerFitDegree;

    auto m = [&](double z) {
        const WValues wv = eval_w(z);
        return h(z) * wv.wp * wv.ew;
    };
    const auto M = cheb::PiecewiseCheb::fit(m, edges, deg).antiderivative(0.0);

    auto F = [&](double s) {
        if (std::abs(s) < 1e-3)
            return 0.5 * jet[0] + jet[1] * s / 3.0 + jet[2] * s * s / 8.0;
        const double wp = eval_w(s).wp;
        return -M(s) / (wp * wp);
    };
    CorrectionFunction out;
    out.fker = cheb::PiecewiseCheb::fit(F, edges, deg);
    out.phi = out.fker.antiderivative(0.0);
    out.s_min = edges.front();

    out.slope = integrate_adaptive(m, -40.0, 0.0, quad_tol) / kSqrt2;
    // intercept integrand: (2/(e^{-√2 s} - 1) + s/√2) h w' e^w. The first factor
    // keeps the kernel normalization Y(0) = Y'(0) = 0 consistent with the
    // far-field expansion; verified against the h = 1 closed form.
    auto g = [&](double s) {
        if (std::abs(s) < 1e-3) return kSqrt2 * jet[0] + (kSqrt2 * jet[1] + jet[0]) * s;
        const double em1 = std::expm1(-kSqrt2 * s);
        return (2.0 / em1 + s / kSqrt2) * m(s);
    };
    out.intercept = -integrate_adaptive(g, -40.0, 0.0, quad_tol);
    return out;
}

template <class H>
CorrectionFunction solve_layer_linear(H&& h, double quad_tol = 1e-10) {
    return solve_layer_linear(h, quad_tol, forcing_jet_fd(h));
}

/// Projection of v: β₁(s) = -(N-1)/r₀ ∫₀ˢ (v(σ) - v(0)) dσ.
class Beta1 {
public:
    Beta1() = default;

    template <class V>
    Beta1(const V& v, const ProblemParams& p) : scale_(-(p.N - 1.0) / p.r0), v0_(v(0.0)) {
        iv_ = cheb::PiecewiseCheb::fit([&v](double s) { return v(s); }, detail::layer_ladder(),
                                       detail::kLayerFitDegree)
                  .antiderivative(0.0);
    }

    double operator()(double s) const { return scale_ * (iv_(s) - v0_ * s); }

private:
    cheb::PiecewiseCheb iv_;
    double scale_ = 0.0, v0_ = 0.0;
};

/// All layer-scale corrections and their far-field coefficients.
struct CorrectionSet {
    ProblemParams params;
    double a1 = 0.0, a2 = 0.0;
    Alpha1 alpha1;
    Alpha2 alpha2;
    CorrectionFunction v;
    Beta1 beta1;
    CorrectionFunction z;
    double nu1 = 0.0, nu2 = 0.0, zeta1 = 0.0, zeta2 = 0.0;
    double nu1_closed_form = 0.0;  ///< -2(N-1)/r₀ (1-ln2) + a₁ √2 ln2
};

/// v = kernel solution for h = α₁, with the ν₁ cross-check against the closed form.
inline CorrectionFunction build_v(const ProblemParams& params, double a1, double quad_tol,
                                  double* closed_form_out = nullptr) {
    const Alpha1 alpha1(params, a1);
    CorrectionFunction v =
        solve_layer_linear([&alpha1](double s) { return alpha1(s); }, quad_tol, {0.0, 0.0, a1});
    const double ln2 = std::log(2.0);
    const double closed = -2.0 * (params.N - 1.0) / params.r0 * (1.0 - ln2) + a1 * kSqrt2 * ln2;
    if (closed_form_out) *closed_form_out = closed;
    if (std::abs(v.slope - closed) > 1e-4)
        throw InternalConsistencyError("build_v: quadrature slope disagrees with closed-form nu1");
    return v;
}

inline Beta1 build_beta1(const CorrectionFunction& v, const ProblemParams& params) {
    return Beta1(v, params);
}

/// z = kernel solution for h = α₂ + β₁ + ½(α₁ + v)².
inline CorrectionFunction build_z(const Alpha1& alpha1, const Alpha2& alpha2, const Beta1& beta1,
                                  const CorrectionFunction& v, double quad_tol) {
    auto h = [&](double s) {
        const double av = alpha1(s) + v(s);
        return alpha2(s) + beta1(s) + 0.5 * av * av;
    };
    return solve_layer_linear(h, quad_tol);
}

/// Build the full correction family from the outer boundary slope.
inline CorrectionSet build_correction_set(const ProblemParams& params, double uprime_r0,
                                          const Tolerances& tol = {}) {
    params.validate();
    tol.validate();
    if (!(uprime_r0 > 0.0))
        throw ParameterError("build_correction_set: U'(r0) must be positive");

    CorrectionSet set;
    set.params = params;
    set.a1 = kSqrt2 / uprime_r0;
    set.a2 = (std::log(4.0) / uprime_r0 - 2.0 * (params.N - 1.0) / params.r0) / uprime_r0;
    set.alpha1 = Alpha1(params, set.a1);
    set.alpha2 = Alpha2(params, set.a1, set.a2);
    set.v = build_v(params, set.a1, tol.quad_tol, &set.nu1_closed_form);
    set.nu1 = set.v.slope;
    set.nu2 = set.v.intercept;
    set.beta1 = build_beta1(set.v, params);
    set.z = build_z(set.alpha1, set.alpha2, set.beta1, set.v, tol.quad_tol);
    set.zeta1 = set.z.slope;
    set.zeta2 = set.z.intercept;
    return set;
}

/// Direct evaluation of α₁ with the log-tail integral done by adaptive quadrature
/// (independent of the cached panel route; used for cross-checks).
inline double eval_alpha1(double s, const ProblemParams& params, double a1,
                          double quad_tol = 1e-10) {
    const double tail = integrate_adaptive(detail::log1p_exp_sqrt2, 0.0, s, quad_tol);
    const double int_w = std::log(4.0) * s + 0.5 * kSqrt2 * s * s - 2.0 * tail;
    return -(params.N - 1.0) / params.r0 * int_w + 0.5 * a1 * s * s;
}

/// Direct evaluation of α₂; double integrals collapsed to single ones by
/// ∫₀ˢ∫₀^σ f(ρ) dρ dσ = ∫₀ˢ (s-ρ) f(ρ) dρ.
inline double eval_alpha2(double s, const ProblemParams& params, double a1, double a2,
                          double quad_tol = 1e-10) {
    const double N = params.N, r0 = params.r0, ln4 = std::log(4.0);
    auto iiw = integrate_adaptive([s](double p) { return (s - p) * eval_w(p).w; }, 0.0, s, quad_tol);
    auto isw = integrate_adaptive([](double p) { return p * eval_w(p).w; }, 0.0, s, quad_tol);
    const double d1 = iiw - 0.5 * ln4 * s * s;
    return d1 + (N - 1.0) * (N - 2.0) / (r0 * r0) * iiw + (N - 1.0) / (r0 * r0) * isw -
           (N - 1.0) / (6.0 * r0) * a1 * s * s * s + 0.5 * a2 * s * s;
}

} // namespace ksteady
