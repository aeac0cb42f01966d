#pragma once

#include "ksteady/errors.hpp"
#include "ksteady/ivp.hpp"
#include "ksteady/tolerances.hpp"

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

namespace ksteady {

struct ProblemParams {
    int N = 2;        ///< spatial dimension
    double r0 = 1.0;  ///< ball radius

    void validate() const {
        if (N < 2) throw ParameterError("ProblemParams: N >= 2 required");
        if (!(r0 > 0.0)) throw ParameterError("ProblemParams: r0 must be positive");
    }
};

/// Radial profile U solving -U'' - (N-1)/r U' + U = 0, U'(0) = 0, U(r0) = 1.
/// Regular at the origin via a power series start, normalized at r0.
class OuterSolution {
public:
    OuterSolution(ProblemParams params, std::vector<double> series_coef, double series_end,
                  OdeTrajectory traj, double norm)
        : params_(params),
          series_c_(std::move(series_coef)),
          series_end_(series_end),
          traj_(std::move(traj)),
          norm_(norm) {
        uprime_r0_ = traj_.end_state()[1] / norm_;
    }

    const ProblemParams& params() const { return params_; }
    double uprime_r0() const { return uprime_r0_; }

    double value(double r) const {
        check_domain(r);
        if (r < series_end_) return series_value(r) / norm_;
        return traj_.eval(r, 0) / norm_;
    }

    double derivative(double r) const {
        check_domain(r);
        if (r < series_end_) return series_slope(r) / norm_;
        return traj_.eval(r, 1) / norm_;
    }

    std::pair<double, double> eval(double r) const { return {value(r), derivative(r)}; }

private:
    void check_domain(double r) const {
        if (r < -1e-12 || r > params_.r0 * (1.0 + 1e-12))
            throw ParameterError("OuterSolution: r outside [0, r0]");
    }

    double series_value(double r) const {
        const double r2 = r * r;
        double acc = 0.0;
        for (std::size_t k = series_c_.size(); k-- > 0;) acc = series_c_[k] + r2 * acc;
        return acc;
    }

    double series_slope(double r) const {
        const double r2 = r * r;
        double acc = 0.0;
        for (std::size_t k = series_c_.size(); k-- > 1;) acc = 2.0 * double(k) * series_c_[k] + r2 * acc;
        return r * acc;
    }

    ProblemParams params_;
    std::vector<double> series_c_;
    double series_end_;
    OdeTrajectory traj_;
    double norm_;
    double uprime_r0_;
};

/// Integrate the regular solution from the origin and normalize so U(r0) = 1.
inline OuterSolution solve_outer(const ProblemParams& params, const Tolerances& tol = {}) {
    params.validate();
    tol.validate();

    // c_{k+1} = c_k / ((2k+2)(2k+N)) resolves the (N-1)/r singularity at 0
    std::vector<double> c{1.0};
    for (int k = 0; k < 12; ++k)
        c.push_back(c.back() / ((2.0 * k + 2.0) * (2.0 * k + params.N)));

    const double r_series = std::min(1e-2, 0.1 * params.r0);
    double f0 = 0.0, fp0 = 0.0;
    {
        const double r2 = r_series * r_series;
        double acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) acc = c[k] + r2 * acc;
        f0 = acc;
        acc = 0.0;
        for (std::size_t k = c.size(); k-- > 1;) acc = 2.0 * double(k) * c[k] + r2 * acc;
        fp0 = r_series * acc;
    }

    const int N = params.N;
    OdeRhs rhs = [N](double r, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -(N - 1) / r * y[1] + y[0];
    };
    IvpOptions opt;
    opt.max_step = (params.r0 - r_series) / 1024.0;
    OdeTrajectory traj = integrate_ivp(rhs, {f0, fp0}, r_series, params.r0,
                                       std::min(tol.ivp_tol, 1e-12), opt);
    const double norm = traj.end_state()[0];
    return OuterSolution(params, std::move(c), r_series, std::move(traj), norm);
}

/// Dense evaluation (value, derivative); throws outside [0, r0].
inline std::pair<double, double> eval_outer(const OuterSolution& sol, double r) {
    return sol.eval(r);
}

} // namespace ksteady
