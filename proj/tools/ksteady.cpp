// Command-line driver: constructions, residual sweeps, solves and reports.
#include "ksteady/pipeline.hpp"
#include "ksteady/report.hpp"
#include "ksteady/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;
using namespace ksteady;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitThreshold = 3;
constexpr int kExitSolver = 4;

struct CommonOpts {
    int N = 2;
    double r0 = 1.0;
    double eta = kDefaultEta;
    std::optional<double> override_eta;
    double override_a2 = 0.0;
    int grid_outer = 600;
    int grid_per_layer = 48;
    double tol_quad = 1e-10;
    double tol_newton = 1e-11;
    std::string out;
    std::uint64_t seed = 12345;
    std::string method = "both";
    std::optional<double> eps;
    std::optional<double> lambda;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--N", o.N, "spatial dimension (>= 2)");
    cmd->add_option("--r0", o.r0, "ball radius")->required();
    cmd->add_option("--eta", o.eta, "interface exponent, delta = eps^eta");
    cmd->add_option("--override-eta", o.override_eta, "replace eta (sensitivity studies)");
    cmd->add_option("--override-a2", o.override_a2, "shift the matched a2 (negative tests)");
    cmd->add_option("--grid-outer", o.grid_outer, "target outer node count");
    cmd->add_option("--grid-per-layer", o.grid_per_layer, "nodes per layer width eps");
    cmd->add_option("--tol-quad", o.tol_quad, "quadrature tolerance");
    cmd->add_option("--tol-newton", o.tol_newton, "nonlinear residual tolerance");
    cmd->add_option("--out", o.out, "output file base path (stdout when empty)");
    cmd->add_option("--seed", o.seed, "seed for the randomized bound probe");
}

Construction make_chain(const CommonOpts& o) {
    Tolerances tol;
    tol.quad_tol = o.tol_quad;
    tol.newton_tol = o.tol_newton;
    const double eta = o.override_eta.value_or(o.eta);
    return build_construction({o.N, o.r0}, eta, tol, o.override_a2);
}

GridSpec make_grid_spec(const CommonOpts& o) { return {o.grid_outer, o.grid_per_layer}; }

double resolve_eps(const CommonOpts& o, const Construction& c) {
    if (o.eps.has_value() == o.lambda.has_value())
        throw ParameterError("exactly one of --eps / --lambda must be given");
    if (o.eps) return *o.eps;
    return eps_of_lambda(*o.lambda, c.consts);
}

void emit(const std::string& base, const std::string& suffix, const std::string& payload) {
    if (base.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(base + suffix, std::ios::binary);
    if (!f) throw ParameterError("cannot open output file " + base + suffix);
    f << payload;
}

json solve_to_json(const SolveResult& r) {
    json j;
    j["eps"] = r.eps;
    j["lambda"] = r.lambda;
    j["iterations"] = r.iterations;
    j["phi_sup"] = r.phi_sup;
    j["final_residual_l1"] = r.final_residual_l1;
    j["mass_scaled"] = r.mass_scaled;
    j["mass_full"] = r.mass_full;
    j["outer_dev"] = r.outer_dev;
    j["layer_dev"] = r.layer_dev;
    j["contraction_ratio"] = r.contraction_ratio;
    j["step_norms"] = r.step_norms;
    return j;
}

int cmd_constants(const CommonOpts& o) {
    Construction c = make_chain(o);
    const auto& k = c.consts;
    const auto& corr = *c.corrections;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["N"] = o.N;
    j["r0"] = o.r0;
    j["eta"] = k.eta;
    j["uprime_r0"] = k.uprime_r0;
    j["nu1_quadrature"] = corr.nu1;
    j["nu1_closed_form"] = corr.nu1_closed_form;
    j["nu2"] = corr.nu2;
    j["zeta1"] = corr.zeta1;
    j["zeta2"] = corr.zeta2;
    j["a1"] = k.a1;
    j["a2"] = k.a2;
    j["a3"] = k.a3;
    j["A1"] = k.A1;
    j["A2"] = k.A2;
    j["A3"] = k.A3;
    std::string text;
    text += "U'(r0)        = " + format_full(k.uprime_r0) + "\n";
    text += "nu1 (quad)    = " + format_full(corr.nu1) + "\n";
    text += "nu1 (closed)  = " + format_full(corr.nu1_closed_form) + "\n";
    text += "nu2           = " + format_full(corr.nu2) + "\n";
    text += "zeta1         = " + format_full(corr.zeta1) + "\n";
    text += "zeta2         = " + format_full(corr.zeta2) + "\n";
    text += "a1 = A1       = " + format_full(k.a1) + "\n";
    text += "a2 = A2       = " + format_full(k.a2) + "\n";
    text += "a3            = " + format_full(k.a3) + "\n";
    text += "A3            = " + format_full(k.A3) + "\n";
    if (o.out.empty()) {
        std::cout << text;
    } else {
        emit(o.out, ".txt", text);
        emit(o.out, ".json", j.dump(2) + "\n");
        // layer-scale correction profiles on s in [-40, 0]
        CsvWriter csv({"s", "alpha1", "alpha2", "v", "beta1", "z"});
        for (int i = 0; i <= 400; ++i) {
            const double s = -40.0 + 40.0 * i / 400.0;
            csv.add_row({s, corr.alpha1(s), corr.alpha2(s), corr.v(s), corr.beta1(s),
                         corr.z(s)});
        }
        emit(o.out, "_corrections.csv", csv.str());
    }
    return kExitOk;
}

int cmd_approx(const CommonOpts& o) {
    Construction c = make_chain(o);
    const double eps = resolve_eps(o, c);
    ApproxSolution a = c.approx(eps);
    auto grid = make_grid_spec(o).make(c.params, eps);
    CsvWriter csv({"r", "u1", "u2", "u3", "ubar", "chi"});
    const double nan = std::nan("");
    for (double r : grid->nodes) {
        double u1 = nan, u2 = nan;
        if (r >= a.params().r0 - 2.2 * a.delta()) u1 = a.u1(r);
        const Cutoff x = a.chi(r);
        if (x.chi > 0.0 && x.chi < 1.0) u2 = x.chi * a.u1(r) + (1.0 - x.chi) * a.u3(r);
        csv.add_row({r, u1, u2, a.u3(r), a.ubar(r), x.chi});
    }
    emit(o.out, ".csv", csv.str());
    return kExitOk;
}

int cmd_residual_sweep(const CommonOpts& o, std::vector<double> eps_list,
                       bool with_refinement) {
    if (eps_list.empty()) eps_list = {0.1, 0.07, 0.05, 0.035, 0.025};
    if (eps_list.size() < 4)
        throw ParameterError("residual-sweep requires at least 4 eps values");
    Construction c = make_chain(o);
    auto sw = residual_sweep(c, eps_list, make_grid_spec(o), with_refinement);
    CsvWriter csv({"eps", "lambda", "l1_layer", "l1_interface", "l1_outer", "l1_total"});
    for (const auto& r : sw.rows)
        csv.add_row({r.eps, r.lambda, r.l1_layer, r.l1_interface, r.l1_outer, r.l1_total});
    json j;
    j["schema_version"] = kSchemaVersion;
    j["sigma_fit"] = sw.sigma_fit;
    j["slope"] = sw.sigma_fit + 1.0;
    if (with_refinement) j["refine_drift"] = sw.refine_drift;
    if (o.out.empty()) {
        std::cout << csv.str() << j.dump(2) << "\n";
    } else {
        emit(o.out, ".csv", csv.str());
        emit(o.out, ".json", j.dump(2) + "\n");
    }
    return sw.sigma_fit > 0.0 ? kExitOk : kExitThreshold;
}

int cmd_solve(const CommonOpts& o) {
    Construction c = make_chain(o);
    const double eps = resolve_eps(o, c);
    if (!(eps > 0.0) || eps > 0.1)
        throw ParameterError("solve requires eps in (0, 0.1]");
    ApproxSolution a = c.approx(eps);
    auto grid = make_grid_spec(o).make(c.params, eps);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["eps"] = eps;
    j["lambda"] = a.lambda();
    std::optional<SolveResult> newton, picard;
    if (o.method == "newton" || o.method == "both")
        newton = newton_solve(a, grid, c.tol.newton_tol, c.tol.max_newton_iters);
    if (o.method == "picard" || o.method == "both")
        picard = fixed_point_solve(a, grid, c.tol.newton_tol);
    if (!newton && !picard) throw ParameterError("--method must be newton, picard or both");
    if (newton) j["newton"] = solve_to_json(*newton);
    if (picard) j["picard"] = solve_to_json(*picard);
    if (newton && picard) {
        double sup = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i)
            sup = std::max(sup, std::abs(newton->u.values[i] - picard->u.values[i]));
        j["method_agreement_sup"] = sup;
    }

    // randomized probe of the L1 -> Linf bound of the linearized operator
    {
        GridFunction ubar = a.sample(grid);
        auto L = build_linearized_log(ubar, a.log_lambda(), c.params);
        double mx = 0.0;
        for (int t = 0; t < 20; ++t) {
            GridFunction h = make_smooth_forcing(grid, o.seed + std::uint64_t(t));
            mx = std::max(mx, solve_linearized(L, h).sup_norm());
        }
        j["apriori_probe_max"] = mx;
        j["apriori_probe_seed"] = o.seed;
    }

    const SolveResult& best = newton ? *newton : *picard;
    CsvWriter csv({"r", "ubar", "phi", "u", "lambda_e_u"});
    GridFunction ubar = a.sample(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->nodes[i];
        csv.add_row({r, ubar.values[i], best.phi.values[i], best.u.values[i],
                     std::exp(a.log_lambda() + best.u.values[i])});
    }
    if (o.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        emit(o.out, ".json", j.dump(2) + "\n");
        emit(o.out, ".csv", csv.str());
    }
    return kExitOk;
}

int cmd_oracle(const CommonOpts& o) {
    Construction c = make_chain(o);
    const double eps = o.eps.value_or(0.1);
    CommonOpts fine = o;
    fine.grid_outer = std::max(o.grid_outer, 4000);
    fine.grid_per_layer = std::max(o.grid_per_layer, 256);
    ApproxSolution a = c.approx(eps);
    auto grid = make_grid_spec(fine).make(c.params, eps);
    auto newton = newton_solve(a, grid, c.tol.newton_tol, c.tol.max_newton_iters);
    const double center = newton.u.values[0];
    auto shot = shooting_oracle(a.lambda(), c.params, {center - 1.0, center + 1.0}, grid, c.tol);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        sup = std::max(sup, std::abs(shot.u.values[i] - newton.u.values[i]));

    json j;
    j["schema_version"] = kSchemaVersion;
    j["eps"] = eps;
    j["lambda"] = a.lambda();
    j["center_value"] = shot.c;
    j["slope_residual"] = shot.slope_residual;
    j["sup_diff_vs_newton"] = sup;
    CsvWriter csv({"r", "u_newton", "u_shooting"});
    for (std::size_t i = 0; i < grid->size(); ++i)
        csv.add_row({grid->nodes[i], newton.u.values[i], shot.u.values[i]});
    if (o.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        emit(o.out, ".json", j.dump(2) + "\n");
        emit(o.out, ".csv", csv.str());
    }
    return kExitOk;
}

int cmd_limits(const CommonOpts& o, std::vector<double> eps_list) {
    if (eps_list.empty()) eps_list = {0.08, 0.04, 0.02};
    if (eps_list.size() < 2) throw ParameterError("limits requires at least 2 eps values");
    Construction c = make_chain(o);
    CsvWriter csv({"eps", "mass_scaled", "layer_dev", "outer_dev", "mass_full"});
    std::vector<SolveResult> rows;
    for (double eps : eps_list) {
        auto res = newton_solve(c.approx(eps), make_grid_spec(o).make(c.params, eps),
                                c.tol.newton_tol, c.tol.max_newton_iters);
        csv.add_row({eps, res.mass_scaled, res.layer_dev, res.outer_dev, res.mass_full});
        rows.push_back(std::move(res));
    }
    emit(o.out, ".csv", csv.str());
    // trend check with 5% slack: mass_scaled, layer_dev, outer_dev fall;
    // mass_full rises
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        monotone = monotone && rows[i].mass_scaled <= rows[i - 1].mass_scaled * 1.05;
        monotone = monotone && rows[i].layer_dev <= rows[i - 1].layer_dev * 1.05;
        monotone = monotone && rows[i].outer_dev <= rows[i - 1].outer_dev * 1.05;
        monotone = monotone && rows[i].mass_full >= rows[i - 1].mass_full * 0.95;
    }
    return monotone ? kExitOk : kExitThreshold;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial boundary-layer steady states of -Δu + u = λe^u on a ball"};
    app.require_subcommand(1);

    CommonOpts o;
    std::vector<double> eps_list;
    bool with_refinement = false;

    auto* constants = app.add_subcommand("constants", "matched constants and far-field data");
    add_common(constants, o);

    auto* approx = app.add_subcommand("approx", "dump the glued approximate solution");
    add_common(approx, o);
    approx->add_option("--eps", o.eps, "layer width");
    approx->add_option("--lambda", o.lambda, "forcing parameter");

    auto* sweep = app.add_subcommand("residual-sweep", "residual norms across an eps sweep");
    add_common(sweep, o);
    sweep->add_option("--eps-list", eps_list, "eps values (strictly decreasing)");
    sweep->add_flag("--refine", with_refinement, "also report grid-refinement drift");

    auto* solve = app.add_subcommand("solve", "correct the approximation to a true solution");
    add_common(solve, o);
    solve->add_option("--eps", o.eps, "layer width");
    solve->add_option("--lambda", o.lambda, "forcing parameter");
    solve->add_option("--method", o.method, "newton|picard|both");

    auto* oracle = app.add_subcommand("oracle", "independent shooting verification");
    add_common(oracle, o);
    oracle->add_option("--eps", o.eps, "layer width (default 0.1)");

    auto* limits = app.add_subcommand("limits", "mass and convergence trends across eps");
    add_common(limits, o);
    limits->add_option("--eps-list", eps_list, "eps values (strictly decreasing)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (constants->parsed()) return cmd_constants(o);
        if (approx->parsed()) return cmd_approx(o);
        if (sweep->parsed()) return cmd_residual_sweep(o, eps_list, with_refinement);
        if (solve->parsed()) return cmd_solve(o);
        if (oracle->parsed()) return cmd_oracle(o);
        if (limits->parsed()) return cmd_limits(o, eps_list);
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConvergenceError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const BracketError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const TrajectoryError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const SingularMatrixError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
