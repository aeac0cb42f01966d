#include <doctest.h>

#include "ksteady/grid.hpp"
#include "ksteady/ivp.hpp"
#include "ksteady/layer.hpp"
#include "ksteady/quadrature.hpp"
#include "ksteady/tolerances.hpp"
#include "ksteady/tridiag.hpp"

#include "oracles.hpp"

#include <cmath>
#include <memory>
#include <random>

using namespace ksteady;

TEST_CASE("graded grid honors its construction contract") {
    auto g = build_graded_grid(1.0, 0.05, 200, 20);
    validate_grid(g);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 1.0);
    // min spacing near r = 1 at most eps/per_layer
    double near = g.nodes.back() - g.nodes[g.size() - 2];
    CHECK(near <= 0.05 / 20 + 1e-15);

    auto g2 = build_graded_grid(2.0, 0.02);
    validate_grid(g2);
    CHECK(g2.nodes.front() == 0.0);
    CHECK(g2.nodes.back() == 2.0);

    CHECK_THROWS_AS(build_graded_grid(1.0, 0.5, 200, 20), ParameterError);
    CHECK_THROWS_AS(build_graded_grid(-1.0, 0.01, 200, 20), ParameterError);
}

TEST_CASE("graded grid validates across parameter sweeps") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> r0d(0.5, 3.0);
    std::uniform_int_distribution<int> outer(50, 900);
    std::uniform_int_distribution<int> pl(4, 64);
    for (int trial = 0; trial < 40; ++trial) {
        const double r0 = r0d(rng);
        const double eps = r0 * std::uniform_real_distribution<double>(0.005, 0.09)(rng);
        auto g = build_graded_grid(r0, eps, outer(rng), pl(rng));
        validate_grid(g);
    }
}

TEST_CASE("adaptive quadrature reproduces layer integrals") {
    auto ew = [](double s) { return eval_w(s).ew; };
    const double half = integrate_adaptive(ew, -40.0, 0.0, 1e-10);
    // oracle: 1e6-panel composite Simpson of the same density
    const double half_oracle = oracles::simpson(ew, -40.0, 0.0, 1000000);
    CHECK(half == doctest::Approx(half_oracle).epsilon(1e-12));
    CHECK(half == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

    const double full = integrate_adaptive(ew, -40.0, 40.0, 1e-10);
    CHECK(full == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));

    CHECK(integrate_adaptive([](double) { return 0.0; }, -3.0, 7.0, 1e-12) == 0.0);
}

TEST_CASE("adaptive quadrature is exact on low-degree polynomials") {
    auto poly = [](double x) {
        return ((((3.0 * x - 2.0) * x + 1.5) * x - 0.25) * x + 2.0) * x - 1.0;
    };
    // exact antiderivative evaluated at the ends
    auto anti = [](double x) {
        return 0.5 * x * x * x * x * x * x - 0.4 * x * x * x * x * x + 0.375 * x * x * x * x -
               x * x * x / 12.0 + x * x - x;
    };
    const double exact = anti(2.0) - anti(-1.0);
    const double got = integrate_adaptive(poly, -1.0, 2.0, 1e-10);
    CHECK(std::abs(got - exact) <= 1e-13 * (1.0 + std::abs(exact)));
}

TEST_CASE("ivp integrator matches classical solutions") {
    OdeRhs cosh_rhs = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = y[0];
    };
    auto traj = integrate_ivp(cosh_rhs, {1.0, 0.0}, 0.0, 1.0, 1e-10);
    CHECK(traj.end_state()[0] == doctest::Approx(std::cosh(1.0)).epsilon(1e-10));

    // dense output between the accepted nodes
    CHECK(traj.eval(0.3, 0) == doctest::Approx(std::cosh(0.3)).epsilon(1e-10));

    OdeRhs exp_rhs = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[0];
    };
    auto traj2 = integrate_ivp(exp_rhs, {1.0}, 0.0, 1.0, 1e-10);
    CHECK(traj2.end_state()[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-10));

    CHECK_THROWS_AS(integrate_ivp(exp_rhs, {1.0}, 1.0, 0.0, 1e-10), ParameterError);
}

TEST_CASE("ivp tolerance halving improves the cosh endpoint") {
    OdeRhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = y[0];
    };
    auto err_at = [&](double tol) {
        auto t = integrate_ivp(rhs, {1.0, 0.0}, 0.0, 1.0, tol);
        return std::abs(t.end_state()[0] - std::cosh(1.0));
    };
    const double e1 = err_at(1e-8);
    const double e2 = err_at(5e-9);
    CHECK(e2 <= e1 / 2.0 * (1.0 + 1e-9));
}

TEST_CASE("banded solve: identity, Laplacian stencil, singular row") {
    Tridiagonal I;
    I.lower = {0, 0, 0, 0};
    I.diag = {1, 1, 1, 1};
    I.upper = {0, 0, 0, 0};
    auto x = solve_banded(I, {3.0, -1.0, 0.5, 2.0});
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(x[3] == doctest::Approx(2.0));

    // 1D Laplacian with known forcing vs dense oracle
    const std::size_t n = 50;
    Tridiagonal A;
    A.lower.assign(n, -1.0);
    A.diag.assign(n, 2.0);
    A.upper.assign(n, -1.0);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = std::sin(0.3 * double(i + 1));
    std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        D[i][i] = 2.0;
        if (i > 0) D[i][i - 1] = -1.0;
        if (i + 1 < n) D[i][i + 1] = -1.0;
    }
    auto xb = solve_banded(A, rhs);
    auto xd = oracles::dense_solve(D, rhs);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(xb[i] - xd[i]) <= 1e-12 * (1.0 + std::abs(xd[i])));

    Tridiagonal Z;
    Z.lower = {0, 0, 0};
    Z.diag = {1, 0, 1};
    Z.upper = {0, 0, 0};
    CHECK_THROWS_AS(solve_banded(Z, {1.0, 1.0, 1.0}), SingularMatrixError);
}

TEST_CASE("banded solve agrees with dense oracle on random dominant systems") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 3 + std::size_t(rng() % 98);
        Tridiagonal A;
        A.lower.assign(n, 0.0);
        A.diag.assign(n, 0.0);
        A.upper.assign(n, 0.0);
        std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = (i > 0) ? uni(rng) : 0.0;
            const double up = (i + 1 < n) ? uni(rng) : 0.0;
            const double dg = (std::abs(lo) + std::abs(up) + 0.5) * (uni(rng) > 0 ? 1.0 : -1.0);
            A.lower[i] = lo;
            A.diag[i] = dg;
            A.upper[i] = up;
            D[i][i] = dg;
            if (i > 0) D[i][i - 1] = lo;
            if (i + 1 < n) D[i][i + 1] = up;
            rhs[i] = uni(rng);
        }
        auto xb = solve_banded(A, rhs);
        auto xd = oracles::dense_solve(D, rhs);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(xb[i] - xd[i]) <= 1e-12 * (1.0 + std::abs(xd[i])));
    }
}

TEST_CASE("quadrature non-convergence carries a partial estimate") {
    // far more oscillations than the panel budget can resolve
    auto wild = [](double x) { return std::sin(1e6 * x); };
    try {
        integrate_adaptive(wild, 0.0, 1.0, 1e-14);
        CHECK(false);
    } catch (const QuadratureError& e) {
        CHECK(std::isfinite(e.partial_estimate));
    }
}

TEST_CASE("ivp blow-up exhausts the step size") {
    // y' = y^2 from y(0)=1 blows up at t=1
    OdeRhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[0] * y[0];
    };
    CHECK_THROWS_AS(integrate_ivp(rhs, {1.0}, 0.0, 2.0, 1e-10), StiffnessError);
}

TEST_CASE("grid function validates its shape") {
    auto grid = std::make_shared<RadialGrid>(build_graded_grid(1.0, 0.05, 100, 16));
    CHECK_THROWS_AS(GridFunction(grid, std::vector<double>(3, 0.0)), ParameterError);
    GridFunction f(grid);
    CHECK(f.all_finite());
    f.values[2] = std::nan("");
    CHECK(!f.all_finite());
    CHECK_THROWS_AS(f.eval(1.7), ParameterError);
}

TEST_CASE("tolerances validate") {
    Tolerances t;
    CHECK_NOTHROW(t.validate());
    t.quad_tol = -1.0;
    CHECK_THROWS_AS(t.validate(), ParameterError);
    Tolerances t2;
    t2.max_newton_iters = 0;
    CHECK_THROWS_AS(t2.validate(), ParameterError);
}
