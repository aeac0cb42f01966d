#pragma once

#include <cmath>

namespace ksteady {

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Closed-form boundary-layer profile: w(s) = ln[4 e^{√2 s} / (1+e^{√2 s})^2],
/// the even solution of -w'' = e^w with w(0) = 0.
struct WValues {
    double w;   ///< w(s)
    double wp;  ///< w'(s)
    double ew;  ///< e^{w(s)}
};

/// Stable for large |s|: factors e^{-√2|s|} before any squaring.
inline WValues eval_w(double s) {
    const double q = std::exp(-kSqrt2 * std::abs(s));
    const double d = 1.0 + q;
    WValues out;
    out.w = std::log(4.0) - kSqrt2 * std::abs(s) - 2.0 * std::log1p(q);
    const double t = (1.0 - q) / d;
    out.wp = (s <= 0.0) ? kSqrt2 * t : -kSqrt2 * t;
    out.ew = 4.0 * q / (d * d);
    return out;
}

/// eps-scaled profile w_eps(r) = ln(4/eps^2) + w((r-r0)/eps) - ln 4.
struct WEpsValues {
    double w;   ///< w_eps(r)
    double wp;  ///< w_eps'(r)
    double ew;  ///< e^{w_eps(r)}
};

inline WEpsValues eval_w_eps(double r, double eps, double r0) {
    const WValues base = eval_w((r - r0) / eps);
    WEpsValues out;
    out.w = base.w - 2.0 * std::log(eps);
    out.wp = base.wp / eps;
    out.ew = base.ew / (eps * eps);
    return out;
}

/// Bounded homogeneous solution of -psi'' - e^w psi = 0 (translation mode, up to scale).
inline double psi_a(double s) { return std::tanh(kSqrt2 * s / 2.0); }

/// Linearly growing homogeneous solution of the same equation.
inline double psi_b(double s) { return -2.0 + kSqrt2 * s * std::tanh(kSqrt2 * s / 2.0); }

} // namespace ksteady
