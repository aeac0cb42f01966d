#pragma once

#include "ksteady/errors.hpp"
#include "ksteady/grid.hpp"
#include "ksteady/ivp.hpp"
#include "ksteady/layer.hpp"
#include "ksteady/matching.hpp"
#include "ksteady/residual.hpp"
#include "ksteady/tolerances.hpp"
#include "ksteady/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

namespace ksteady {

/// Tridiagonal discretization of L(φ) = -φ'' - (N-1)/r φ' + φ - λ e^{ū} φ
/// with Neumann rows at both ends (ghost reflection; -N φ'' regularization at 0).
struct LinearizedOperator {
    std::shared_ptr<const RadialGrid> grid;
    Tridiagonal A;
};

inline LinearizedOperator build_linearized_log(const GridFunction& ubar, double log_lambda,
                                               const ProblemParams& params) {
    const auto& x = ubar.grid->nodes;
    const std::size_t n = x.size();
    LinearizedOperator L;
    L.grid = ubar.grid;
    L.A.lower.assign(n, 0.0);
    L.A.diag.assign(n, 0.0);
    L.A.upper.assign(n, 0.0);

    auto pot = [&](std::size_t i) { return 1.0 - std::exp(log_lambda + ubar.values[i]); };

    {
        const double h0 = x[1] - x[0];
        L.A.diag[0] = 2.0 * params.N / (h0 * h0) + pot(0);
        L.A.upper[0] = -2.0 * params.N / (h0 * h0);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        const double denom = hm * hp * (hm + hp);
        const double cr = (params.N - 1.0) / x[i];
        L.A.lower[i] = -2.0 * hp / denom + cr * hp * hp / denom;
        L.A.diag[i] = 2.0 * (hm + hp) / denom - cr * (hp * hp - hm * hm) / denom + pot(i);
        L.A.upper[i] = -2.0 * hm / denom - cr * hm * hm / denom;
    }
    {
        const double h = x[n - 1] - x[n - 2];
        L.A.lower[n - 1] = -2.0 / (h * h);
        L.A.diag[n - 1] = 2.0 / (h * h) + pot(n - 1);
    }
    return L;
}

inline LinearizedOperator build_linearized(const GridFunction& ubar, double lambda,
                                           const ProblemParams& params) {
    if (!(lambda > 0.0)) throw ParameterError("build_linearized: lambda must be positive");
    return build_linearized_log(ubar, std::log(lambda), params);
}

/// Solve L φ = h; throws SingularMatrixError outside the perturbative regime.
inline GridFunction solve_linearized(const LinearizedOperator& L, const GridFunction& h) {
    if (h.grid != L.grid && h.grid->nodes != L.grid->nodes)
        throw ParameterError("solve_linearized: grid mismatch");
    return GridFunction(L.grid, solve_banded(L.A, h.values));
}

/// Floating-point evaluation floor of the discrete residual: the roundoff in
/// forming the stencil terms, accumulated in the L1 norm. The discrete solution
/// cannot be certified below this level.
inline double residual_fp_floor(const GridFunction& u, double log_lambda,
                                const ProblemParams& params) {
    const auto& x = u.grid->nodes;
    const std::size_t n = x.size();
    const double me = std::numeric_limits<double>::epsilon();
    std::vector<double> noise(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double stencil;
        if (i == 0) {
            const double h0 = x[1] - x[0];
            stencil = 2.0 * params.N * (std::abs(u.values[1]) + std::abs(u.values[0])) / (h0 * h0);
        } else if (i + 1 == n) {
            const double h = x[n - 1] - x[n - 2];
            stencil = 2.0 * (std::abs(u.values[n - 2]) + std::abs(u.values[n - 1])) / (h * h);
        } else {
            const double hm = x[i] - x[i - 1];
            const double hp = x[i + 1] - x[i];
            const double denom = hm * hp * (hm + hp);
            stencil = 2.0 *
                      (hm * std::abs(u.values[i + 1]) + (hm + hp) * std::abs(u.values[i]) +
                       hp * std::abs(u.values[i - 1])) /
                      denom;
            stencil += (params.N - 1.0) / x[i] *
                       (hm * hm * std::abs(u.values[i + 1]) +
                        (hp * hp + hm * hm) * std::abs(u.values[i]) +
                        hp * hp * std::abs(u.values[i - 1])) /
                       denom;
        }
        noise[i] = me * (stencil + std::abs(u.values[i]) + std::exp(log_lambda + u.values[i]));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc += 0.5 * (x[i + 1] - x[i]) * (noise[i] + noise[i + 1]);
    return acc;
}

/// Converged solve with diagnostics of the limiting behaviors.
struct SolveResult {
    GridFunction u;              ///< ū + φ
    GridFunction phi;            ///< correction
    double phi_sup = 0.0;
    int iterations = 0;
    double final_residual_l1 = 0.0;
    double mass_scaled = 0.0;    ///< λ ε ∫ e^u dr
    double mass_full = 0.0;      ///< λ ω_{N-1} ∫ e^u r^{N-1} dr
    double outer_dev = 0.0;      ///< sup over [0.1, 0.8] r0 of |ε u - √2/U'(r0) U|
    double layer_dev = 0.0;      ///< sup over s in [-10,0] of |λ ε² e^{u(εs+r0)} - e^w|
    double contraction_ratio = 0.0;  ///< Picard geometric ratio (0 for Newton)
    std::vector<double> step_norms;
    double eps = 0.0, lambda = 0.0;
};

inline double unit_sphere_area(int N) {
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

/// (λ ε ∫ e^u dr, λ ω_{N-1} ∫ e^u r^{N-1} dr); exponentials are max-shifted
/// through logλ + u to avoid overflow.
inline std::pair<double, double> mass(const GridFunction& u, double lambda, double eps,
                                      const ProblemParams& params) {
    const double log_lambda = std::log(lambda);
    const auto& x = u.grid->nodes;
    double plain = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        const double f0 = std::exp(log_lambda + u.values[i]);
        const double f1 = std::exp(log_lambda + u.values[i + 1]);
        plain += 0.5 * h * (f0 + f1);
        weighted += 0.5 * h *
                    (f0 * std::pow(x[i], params.N - 1) + f1 * std::pow(x[i + 1], params.N - 1));
    }
    return {eps * plain, unit_sphere_area(params.N) * weighted};
}

/// sup over s in [-10, 0] of |λ ε² e^{u(εs+r0)} - e^{w(s)}|.
inline double layer_convergence_check(const GridFunction& u, double eps, double lambda,
                                      double r0) {
    const double shift = std::log(lambda) + 2.0 * std::log(eps);
    double dev = 0.0;
    const int n = 801;
    for (int k = 0; k < n; ++k) {
        const double s = -10.0 + 10.0 * double(k) / double(n - 1);
        const double r = r0 + eps * s;
        const double scaled = std::exp(shift + u.eval(r));
        dev = std::max(dev, std::abs(scaled - eval_w(s).ew));
    }
    return dev;
}

/// sup over the window of |ε u(r) - √2/U'(r0) · U(r)|.
inline double outer_convergence_check(const GridFunction& u, double eps,
                                      const OuterSolution& outer,
                                      std::pair<double, double> window) {
    const double r0 = outer.params().r0;
    if (!(window.first > 0.0) || !(window.second > window.first) || !(window.second < r0))
        throw ParameterError("outer_convergence_check: window must satisfy 0 < w1 < w2 < r0");
    const double amp = kSqrt2 / outer.uprime_r0();
    double dev = 0.0;
    const int n = 401;
    for (int k = 0; k < n; ++k) {
        const double r = window.first + (window.second - window.first) * double(k) / double(n - 1);
        dev = std::max(dev, std::abs(eps * u.eval(r) - amp * outer.value(r)));
    }
    return dev;
}

namespace detail {

inline void finalize_result(SolveResult& res, const ApproxSolution& approx) {
    res.eps = approx.eps();
    res.lambda = approx.lambda();
    res.phi_sup = res.phi.sup_norm();
    res.final_residual_l1 = l1_norm(residual_log(res.u, approx.log_lambda(), approx.params()));
    auto m = mass(res.u, approx.lambda(), approx.eps(), approx.params());
    res.mass_scaled = m.first;
    res.mass_full = m.second;
    const double r0 = approx.params().r0;
    res.outer_dev = outer_convergence_check(res.u, approx.eps(), approx.outer(),
                                            {0.1 * r0, 0.8 * r0});
    res.layer_dev = layer_convergence_check(res.u, approx.eps(), approx.lambda(), r0);
}

} // namespace detail

/// Picard iteration of the contraction map φ ← L^{-1}[N(φ) - R(ū)] with
/// N(φ) = λ e^{ū}(e^φ - 1 - φ), from φ = 0, until ‖φ_{k+1} - φ_k‖_∞ <= tol.
inline SolveResult fixed_point_solve(const ApproxSolution& approx,
                                     std::shared_ptr<const RadialGrid> grid, double tol,
                                     int max_iters = 200) {
    const ProblemParams& params = approx.params();
    const double log_lambda = approx.log_lambda();
    GridFunction ubar = approx.sample(grid);
    GridFunction R = residual_log(ubar, log_lambda, params);
    LinearizedOperator L = build_linearized_log(ubar, log_lambda, params);

    const std::size_t n = grid->size();
    GridFunction phi(grid);
    GridFunction rhs(grid);
    SolveResult res;
    double prev_dn = 0.0;
    int grew = 0;
    for (int k = 0; k < max_iters; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::exp(log_lambda + ubar.values[i]);
            rhs.values[i] = w * (std::expm1(phi.values[i]) - phi.values[i]) - R.values[i];
        }
        GridFunction phi_new = solve_linearized(L, rhs);
        double dn = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            dn = std::max(dn, std::abs(phi_new.values[i] - phi.values[i]));
        phi = std::move(phi_new);
        res.step_norms.push_back(dn);
        res.iterations = k + 1;
        if (k > 0 && prev_dn > 0.0) {
            const double ratio = dn / prev_dn;
            if (prev_dn > 10.0 * tol && dn > 10.0 * tol)
                res.contraction_ratio = std::max(res.contraction_ratio, ratio);
            grew = (ratio > 1.0) ? grew + 1 : 0;
            if (grew >= 3 || !std::isfinite(dn) || dn > 1e8)
                throw ConvergenceError(
                    "fixed_point_solve: iteration is not contracting (step norm " +
                    std::to_string(dn) + " after " + std::to_string(k + 1) + " iterations)");
        }
        prev_dn = dn;
        if (dn <= tol) {
            res.u = GridFunction(grid);
            for (std::size_t i = 0; i < n; ++i)
                res.u.values[i] = ubar.values[i] + phi.values[i];
            res.phi = std::move(phi);
            detail::finalize_result(res, approx);
            return res;
        }
    }
    throw ConvergenceError("fixed_point_solve: no convergence within iteration budget");
}

/// Damped Newton on the full discrete residual, starting from ū.
inline SolveResult newton_solve(const ApproxSolution& approx,
                                std::shared_ptr<const RadialGrid> grid, double tol,
                                int max_iters = 30) {
    const ProblemParams& params = approx.params();
    const double log_lambda = approx.log_lambda();
    GridFunction ubar = approx.sample(grid);
    const std::size_t n = grid->size();

    GridFunction u = ubar;
    GridFunction F = residual_log(u, log_lambda, params);
    double fnorm = l1_norm(F);
    const double scale = std::max(1.0, fnorm);
    const double floor = residual_fp_floor(ubar, log_lambda, params);

    SolveResult res;
    for (int k = 0; k < max_iters; ++k) {
        if (fnorm <= std::max(tol * scale, 3.0 * floor)) break;
        LinearizedOperator J = build_linearized_log(u, log_lambda, params);
        GridFunction neg(grid);
        for (std::size_t i = 0; i < n; ++i) neg.values[i] = -F.values[i];
        GridFunction du = solve_linearized(J, neg);

        double t = 1.0;
        GridFunction u_try(grid);
        double fnorm_try = 0.0;
        GridFunction F_try;
        while (true) {
            for (std::size_t i = 0; i < n; ++i)
                u_try.values[i] = u.values[i] + t * du.values[i];
            F_try = residual_log(u_try, log_lambda, params);
            fnorm_try = l1_norm(F_try);
            if (fnorm_try < (1.0 - 1e-4 * t) * fnorm || fnorm_try <= 3.0 * floor) break;
            t *= 0.5;
            if (t < 1e-7)
                throw ConvergenceError("newton_solve: line search failed at iteration " +
                                       std::to_string(k + 1));
        }
        double step = 0.0;
        for (std::size_t i = 0; i < n; ++i) step = std::max(step, t * std::abs(du.values[i]));
        res.step_norms.push_back(step);
        res.iterations = k + 1;
        u = std::move(u_try);
        F = std::move(F_try);
        fnorm = fnorm_try;
        if (step <= 1e-13 * (1.0 + u.sup_norm())) break;  // machine-accurate stall
    }
    if (fnorm > std::max(tol * scale, 100.0 * floor))
        throw ConvergenceError("newton_solve: residual " + std::to_string(fnorm) +
                               " above tolerance after " + std::to_string(res.iterations) +
                               " iterations");
    res.u = u;
    res.phi = GridFunction(grid);
    for (std::size_t i = 0; i < n; ++i) res.phi.values[i] = u.values[i] - ubar.values[i];
    detail::finalize_result(res, approx);
    return res;
}

/// Shooting result: the dense trajectory sampled on a grid plus the shot data.
struct ShootingResult {
    GridFunction u;
    double c = 0.0;               ///< matched center value u(0)
    double slope_residual = 0.0;  ///< |u'(r0)| at the returned c
};

/// Independent verification path: integrate u(0)=c, u'(0)=0 from the origin
/// and bisect c until u'(r0) = 0. The IVP leaves the origin on a quartic
/// series consistent with the regularized operator.
inline ShootingResult shooting_oracle(double lambda, const ProblemParams& params,
                                      std::pair<double, double> bracket,
                                      std::shared_ptr<const RadialGrid> grid,
                                      const Tolerances& tol = {}) {
    params.validate();
    if (!(lambda > 0.0)) throw ParameterError("shooting_oracle: lambda must be positive");
    const double log_lambda = std::log(lambda);
    const int N = params.N;
    const double r0 = params.r0;
    const double r_start = 1e-3 * r0;
    const double ivp_tol = std::min(tol.ivp_tol, 1e-12);

    OdeRhs rhs = [N, log_lambda, r0](double r, std::span<const double> y, std::span<double> dy) {
        const double e = log_lambda + y[0];
        if (e > 500.0) throw TrajectoryError("shooting_oracle: blow-up before r0", r);
        dy[0] = y[1];
        dy[1] = -(N - 1) / r * y[1] + y[0] - std::exp(e);
    };

    auto integrate_from = [&](double c) {
        const double lec = std::exp(log_lambda + c);
        const double b = (c - lec) / (2.0 * N);
        const double d = b * (1.0 - lec) / (4.0 * N + 8.0);
        const double rs2 = r_start * r_start;
        std::vector<double> y0{c + b * rs2 + d * rs2 * rs2,
                               2.0 * b * r_start + 4.0 * d * rs2 * r_start};
        return integrate_ivp(rhs, std::move(y0), r_start, r0, ivp_tol);
    };
    auto shot = [&](double c) { return integrate_from(c).end_state()[1]; };

    double c_lo = bracket.first, c_hi = bracket.second;
    if (!(c_hi > c_lo)) throw ParameterError("shooting_oracle: invalid bracket");
    double g_lo = shot(c_lo);
    double g_hi = shot(c_hi);
    if (g_lo == 0.0) c_hi = c_lo;
    else if (g_hi == 0.0) c_lo = c_hi;
    else if (g_lo * g_hi > 0.0)
        throw BracketError("shooting_oracle: no sign change of u'(r0) in bracket");

    for (int it = 0; it < 200 && c_hi - c_lo > 4.0 * std::numeric_limits<double>::epsilon() *
                                                    std::max(1.0, std::abs(c_hi));
         ++it) {
        const double mid = 0.5 * (c_lo + c_hi);
        const double gm = shot(mid);
        if (gm == 0.0) {
            c_lo = c_hi = mid;
            break;
        }
        if (gm * g_lo > 0.0) {
            c_lo = mid;
            g_lo = gm;
        } else {
            c_hi = mid;
            g_hi = gm;
        }
    }
    const double c = 0.5 * (c_lo + c_hi);
    OdeTrajectory traj = integrate_from(c);

    ShootingResult out;
    out.c = c;
    out.slope_residual = std::abs(traj.end_state()[1]);
    out.u = GridFunction(grid);
    const auto& x = grid->nodes;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= r_start) {
            const double lec = std::exp(log_lambda + c);
            const double b = (c - lec) / (2.0 * N);
            out.u.values[i] = c + b * x[i] * x[i];
        } else {
            out.u.values[i] = traj.eval(x[i], 0);
        }
    }
    return out;
}

/// Smooth random forcing normalized to unit L1 norm (seeded, deterministic).
inline GridFunction make_smooth_forcing(std::shared_ptr<const RadialGrid> grid,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> coef(7);
    for (double& c : coef) c = uni(rng);
    GridFunction h(grid);
    const double r0 = grid->r0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k)
            v += coef[k] * std::cos(double(k) * M_PI * grid->nodes[i] / r0);
        h.values[i] = v;
    }
    const double norm = l1_norm(h);
    if (norm < 1e-12) return make_smooth_forcing(grid, seed + 0x9e3779b97f4a7c15ull);
    for (double& v : h.values) v /= norm;
    return h;
}

/// Finite-difference verification of the closed-form kernel of -ψ'' - e^w ψ = 0.
struct KernelCheckReport {
    double max_residual_a = 0.0;  ///< bounded solution ψ_a
    double max_residual_b = 0.0;  ///< linearly growing solution ψ_b
    double psi_a_at_0 = 0.0;
    double psi_a_prime_at_0 = 0.0;
    bool psi_b_unbounded = false;
};

inline KernelCheckReport kernel_check() {
    KernelCheckReport rep;
    const double d = 1e-2;
    auto fd_residual = [&](auto&& psi, double s) {
        const double second = (-psi(s - 2 * d) + 16.0 * psi(s - d) - 30.0 * psi(s) +
                               16.0 * psi(s + d) - psi(s + 2 * d)) /
                              (12.0 * d * d);
        return std::abs(-second - eval_w(s).ew * psi(s));
    };
    for (double s : {-8.0, -3.0, -1.0, -0.1}) {
        rep.max_residual_a = std::max(rep.max_residual_a, fd_residual(psi_a, s));
        rep.max_residual_b = std::max(rep.max_residual_b, fd_residual(psi_b, s));
    }
    rep.psi_a_at_0 = psi_a(0.0);
    rep.psi_a_prime_at_0 =
        (-psi_a(2 * d) + 8.0 * psi_a(d) - 8.0 * psi_a(-d) + psi_a(-2 * d)) / (12.0 * d);
    rep.psi_b_unbounded = std::abs(psi_b(-30.0)) > 2.0 * std::abs(psi_b(-10.0));
    return rep;
}

} // namespace ksteady
