#include <doctest.h>

#include "ksteady/pipeline.hpp"
#include "ksteady/residual.hpp"
#include "ksteady/solver.hpp"

#include <cmath>
#include <memory>
#include <vector>

using namespace ksteady;

TEST_CASE("constant solution branch has zero residual") {
    // u = c solves the equation when lambda = c e^{-c}
    const double c = 0.7;
    const double lambda = c * std::exp(-c);
    auto grid = std::make_shared<RadialGrid>(build_graded_grid(1.0, 0.05, 100, 16));
    GridFunction u(grid);
    for (double& v : u.values) v = c;
    GridFunction R = residual(u, lambda, {2, 1.0});
    // nonzero only through stencil roundoff at layer-scale spacings
    for (double v : R.values) CHECK(std::abs(v) <= 1e-11);
}

TEST_CASE("l1 norm trivial values") {
    auto grid = std::make_shared<RadialGrid>(build_graded_grid(1.0, 0.05, 100, 16));
    GridFunction one(grid);
    for (double& v : one.values) v = 1.0;
    CHECK(l1_norm(one) == doctest::Approx(1.0).epsilon(1e-13));

    auto grid2 = std::make_shared<RadialGrid>(build_graded_grid(2.0, 0.1, 100, 16));
    GridFunction m2(grid2);
    for (double& v : m2.values) v = -2.0;
    CHECK(l1_norm(m2) == doctest::Approx(4.0).epsilon(1e-13));

    // hat of height 1 supported on width 0.1 has area 0.05
    GridFunction hat(grid);
    const double c0 = 0.5, w = 0.05;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double d = std::abs(grid->nodes[i] - c0);
        hat.values[i] = std::max(0.0, 1.0 - d / w);
    }
    CHECK(l1_norm(hat) == doctest::Approx(0.05).epsilon(2e-3));
}

TEST_CASE("regional split sums to the total") {
    ProblemParams p{2, 1.0};
    auto c = build_construction(p);
    auto approx = c.approx(0.05);
    auto grid = GridSpec{}.make(p, 0.05);
    GridFunction R = residual_log(approx.sample(grid), approx.log_lambda(), p);
    RegionalL1 parts = regional_l1(R, approx.delta());
    CHECK(parts.layer + parts.interface_zone + parts.outer ==
          doctest::Approx(parts.total).epsilon(1e-12));
    CHECK(parts.total == doctest::Approx(l1_norm(R)).epsilon(1e-12));
    CHECK(parts.total >= 0.0);
}

TEST_CASE("scaling fit recovers synthetic power laws") {
    std::vector<std::pair<double, double>> quad, lin;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        quad.emplace_back(eps, eps * eps);
        lin.emplace_back(eps, eps);
    }
    CHECK(scaling_fit(quad) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scaling_fit(lin) == doctest::Approx(0.0).epsilon(1e-12));

    std::vector<std::pair<double, double>> bad{
        {0.1, 1.0}, {0.05, -1.0}, {0.025, 1.0}, {0.0125, 1.0}};
    CHECK_THROWS_AS(scaling_fit(bad), DomainError);
    std::vector<std::pair<double, double>> few{{0.1, 1.0}, {0.05, 1.0}};
    CHECK_THROWS_AS(scaling_fit(few), ParameterError);
    std::vector<std::pair<double, double>> increasing{
        {0.0125, 1.0}, {0.025, 1.0}, {0.05, 1.0}, {0.1, 1.0}};
    CHECK_THROWS_AS(scaling_fit(increasing), ParameterError);
}

TEST_CASE("residual of the glued approximation: fixture and refinement stability") {
    ProblemParams p{2, 1.0};
    auto c = build_construction(p);
    const ResidualReport row = residual_report(c, 0.05);
    // regression fixture recorded from the first converged build (eta = 0.68)
    CHECK(row.l1_total == doctest::Approx(1.4301238779026253).epsilon(1e-10));
    CHECK(row.l1_layer + row.l1_interface + row.l1_outer ==
          doctest::Approx(row.l1_total).epsilon(1e-12));

    GridSpec fine{1200, 96};
    const ResidualReport refined = residual_report(c, 0.05, fine);
    CHECK(std::abs(refined.l1_total - row.l1_total) / row.l1_total < 0.02);
}

TEST_CASE("residual sweep scales faster than eps at the default eta") {
    ProblemParams p{2, 1.0};
    auto c = build_construction(p);
    auto sw = residual_sweep(c, {0.1, 0.07, 0.05, 0.035, 0.025});
    CHECK(sw.sigma_fit > 0.05);
    // monotone decrease of the total norm across the sweep
    for (std::size_t i = 1; i < sw.rows.size(); ++i)
        CHECK(sw.rows[i].l1_total < sw.rows[i - 1].l1_total);
}

TEST_CASE("post-solve residual sits at the evaluation floor") {
    ProblemParams p{2, 1.0};
    auto c = build_construction(p);
    auto approx = c.approx(0.05);
    auto grid = GridSpec{}.make(p, 0.05);
    auto res = newton_solve(approx, grid, c.tol.newton_tol, c.tol.max_newton_iters);
    const double floor = residual_fp_floor(res.u, approx.log_lambda(), p);
    CHECK(res.final_residual_l1 <= 100.0 * floor);
}
