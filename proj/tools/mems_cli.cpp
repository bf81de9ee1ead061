// Command-line front end. Subcommands:
//
//   validate     hypothesis report for the configured model
//   solve        minimal solution at a fixed lambda (CSV + JSON)
//   pullin       analytic bounds + monotone bisection bracket for lambda*
//   branch       lambda sweep for the bifurcation diagram
//   asymptotics  touchdown constants theta, sigma, kappa, exponent
//   shoot        backward shot: T*, lambda*, touchdown profile, asymptotic fit
//   crosscheck   bisection bracket vs shooter lambda*, pass/fail at a threshold
//
// Exit codes: 0 success, 1 computational failure, 2 usage or config errors.
// All artifacts land in the output directory; every JSON report embeds the
// resolved configuration so a run can be reproduced from its outputs alone.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "mems/asymptotics.hpp"
#include "mems/config.hpp"
#include "mems/model.hpp"
#include "mems/output.hpp"
#include "mems/pullin.hpp"
#include "mems/quadrature.hpp"
#include "mems/shooter.hpp"
#include "mems/solver.hpp"
#include "mems/svg.hpp"

using nlohmann::ordered_json;

namespace {

ordered_json json_num(double x) {
    return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

ordered_json config_echo(const mems::run_config& rc) {
    const auto& m = rc.mdl;
    ordered_json model;
    model["operator"] = m.op_kind;
    if (m.op_kind == "power_monomial") {
        model["alpha"] = m.alpha;
        model["beta"] = m.beta;
    } else if (m.op_kind == "monomial_sum") {
        ordered_json terms = ordered_json::array();
        for (const auto& [a, b] : m.terms) terms.push_back({a, b});
        model["terms"] = terms;
    } else if (m.op_kind == "variable_exponent") {
        model["N"] = m.N;
        model["eps"] = m.eps;
        if (m.p_linear) {
            model["p_lo"] = m.p_lo;
            model["p_hi"] = m.p_hi;
        } else {
            model["p_const"] = m.p_const;
        }
    } else {
        model["N"] = m.N;
        model["rho"] = m.rho;
    }
    model["gap"] = m.gap_kind;
    model["p"] = m.p;
    model["source"] = m.source_kind;
    model["gamma"] = m.gamma;
    model["C"] = m.C;

    ordered_json num;
    num["M"] = rc.num.M;
    num["grading"] = rc.num.grading;
    num["tol_fix"] = rc.num.tol_fix;
    num["tol_res"] = rc.num.tol_res;
    num["dt"] = rc.num.dt;
    num["T_auto"] = rc.num.T_auto;
    if (!rc.num.T_auto) num["T"] = rc.num.T;
    num["max_iter"] = rc.num.max_iter;

    ordered_json out;
    out["dir"] = rc.out.dir;
    out["svg"] = rc.out.svg;
    return {{"model", model}, {"numerics", num}, {"output", out}};
}

void write_json(const std::string& path, const ordered_json& j) {
    mems::write_text(path, j.dump(2) + "\n");
}

std::string out_path(const mems::run_config& rc, const std::string& name) {
    return (std::filesystem::path(rc.out.dir) / name).string();
}

// returns 0 when the model may be solved, 1 otherwise (report printed)
int solve_gate(const mems::model& mdl, bool force) {
    const auto rep = mems::validate_hypotheses(mdl.op, mdl.gap, mdl.src);
    if (rep.solve_ok()) return 0;
    for (const auto& c : rep.checks)
        if (c.applicable && c.required_for_solve && !c.pass)
            std::cerr << "hypothesis " << c.name << " failed: " << c.detail << "\n";
    if (force) {
        std::cerr << "continuing anyway (--force)\n";
        return 0;
    }
    std::cerr << "refusing to solve; pass --force to override\n";
    return 1;
}

mems::shooter_config shooter_setup(const mems::asymptotic_constants& k,
                                   const mems::numerics_spec& num) {
    mems::shooter_config cfg;
    if (num.T_auto) {
        cfg = mems::shooter_config::automatic(k);
    } else {
        cfg.T = num.T;
        cfg.t_floor = num.T - 200.0;
    }
    cfg.dt = num.dt;
    return cfg;
}

int cmd_validate(const mems::run_config& rc) {
    const mems::model mdl = rc.build_model();
    const auto rep = mems::validate_hypotheses(mdl.op, mdl.gap, mdl.src);

    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
        std::printf("%-14s %s%s%s\n", c.name.c_str(),
                    !c.applicable ? "n/a" : (c.pass ? "pass" : "FAIL"),
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
        checks.push_back({{"name", c.name},
                          {"applicable", c.applicable},
                          {"required_for_solve", c.required_for_solve},
                          {"pass", c.pass},
                          {"detail", c.detail}});
    }
    std::printf("phi_inv_integral %.17g (refined %.17g)\n", rep.phi_inv_integral,
                rep.phi_inv_integral_refined);

    write_json(out_path(rc, "validate.json"),
               {{"config", config_echo(rc)},
                {"checks", checks},
                {"phi_inv_integral", json_num(rep.phi_inv_integral)},
                {"phi_inv_integral_refined", json_num(rep.phi_inv_integral_refined)},
                {"all_pass", rep.all_pass()}});
    return rep.all_pass() ? 0 : 1;
}

int cmd_solve(const mems::run_config& rc, double lambda, bool force) {
    const mems::model mdl = rc.build_model();
    if (int rc_gate = solve_gate(mdl, force)) return rc_gate;

    ordered_json j{{"config", config_echo(rc)}, {"lambda", lambda}};
    mems::solution_grid sol;
    mems::iteration_report rep;
    try {
        std::tie(sol, rep) = mems::solve_from_subsolution(mdl, lambda, rc.grid(), rc.solver());
    } catch (const std::exception& e) {
        j["error"] = e.what();
        write_json(out_path(rc, "solve.json"), j);
        std::cerr << "solve failed: " << e.what() << "\n";
        return 1;
    }

    j["status"] = mems::to_string(rep.status);
    j["iterations"] = rep.iterations;
    j["final_delta"] = json_num(rep.final_delta);
    j["residual"] = json_num(rep.residual);
    j["u0"] = rep.status == mems::iter_status::converged ? json_num(sol.u.front())
                                                         : json_num(rep.u0_last_subcritical);
    write_json(out_path(rc, "solve.json"), j);

    mems::csv_table csv;
    csv.header = {"r", "u"};
    for (std::size_t i = 0; i < sol.grid.r.size(); ++i)
        csv.add_row({mems::fmt17(sol.grid.r[i]), mems::fmt17(sol.u[i])});
    mems::write_csv(out_path(rc, "solve.csv"), csv);

    if (rc.out.svg) {
        mems::svg_series s{sol.grid.r, sol.u, "#1f6fb2", "u(r)"};
        mems::write_text(out_path(rc, "solve.svg"),
                         mems::svg_line_plot({s}, {"minimal solution, lambda = " +
                                                       mems::fmt17(lambda),
                                                   "r", "u", false, false}));
    }

    std::printf("%s after %d iterations", mems::to_string(rep.status), rep.iterations);
    if (std::isfinite(rep.residual)) std::printf(", residual %.3g", rep.residual);
    std::printf("\n");
    return rep.status == mems::iter_status::max_iterations ? 1 : 0;
}

int cmd_pullin(const mems::run_config& rc, double width, bool force) {
    const mems::model mdl = rc.build_model();
    if (int rc_gate = solve_gate(mdl, force)) return rc_gate;

    mems::pull_in_estimate est;
    try {
        est = mems::bisect_pullin(mdl, width, std::numeric_limits<double>::infinity(),
                                  rc.grid(), rc.solver());
    } catch (const std::exception& e) {
        std::cerr << "pullin failed: " << e.what() << "\n";
        return 1;
    }

    write_json(out_path(rc, "pullin.json"),
               {{"config", config_echo(rc)},
                {"width", width},
                {"lower", est.lower},
                {"upper", est.upper},
                {"bracket_lo", est.bracket_lo},
                {"bracket_hi", est.bracket_hi},
                {"evaluations", est.evaluations},
                {"low_confidence", est.low_confidence}});

    mems::csv_table csv;
    csv.header = {"lambda", "classification"};
    for (const auto& t : est.trace)
        csv.add_row({mems::fmt17(t.lambda), mems::to_string(t.status)});
    mems::write_csv(out_path(rc, "pullin_trace.csv"), csv);

    std::printf("lower %.17g upper %.17g bracket [%.17g, %.17g]%s\n", est.lower, est.upper,
                est.bracket_lo, est.bracket_hi, est.low_confidence ? " (low confidence)" : "");
    return 0;
}

std::vector<double> parse_lambda_grid(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        double lo = 0.0, hi = 0.0;
        int count = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
            throw std::invalid_argument("--lambdas range must be lo:hi:count");
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("--lambdas entry '" + item + "' is not a number");
        }
    }
    return out;
}

int cmd_branch(const mems::run_config& rc, const std::string& lambdas_text, bool lambdas_given,
               double width, int jobs, bool force) {
    const mems::model mdl = rc.build_model();
    if (int rc_gate = solve_gate(mdl, force)) return rc_gate;

    std::vector<double> lambdas;
    if (lambdas_given) {
        lambdas = parse_lambda_grid(lambdas_text);
    } else {
        // default sweep: 32 points from 0 up to the bisection bracket top
        const auto est = mems::bisect_pullin(mdl, width, std::numeric_limits<double>::infinity(),
                                             rc.grid(), rc.solver());
        for (int i = 0; i < 32; ++i) lambdas.push_back(est.bracket_hi * i / 31.0);
    }

    const auto points = mems::branch_sweep(mdl, lambdas, rc.grid(), rc.solver(), jobs);

    mems::csv_table csv;
    csv.header = {"lambda", "u0", "norm_sup", "status"};
    for (const auto& p : points)
        csv.add_row({mems::fmt17(p.lambda), mems::fmt17(p.u0), mems::fmt17(p.norm_sup),
                     mems::to_string(p.status)});
    mems::write_csv(out_path(rc, "branch.csv"), csv);

    if (rc.out.svg) {
        mems::svg_series s;
        s.label = "u(r0)";
        for (const auto& p : points) {
            s.x.push_back(p.lambda);
            s.y.push_back(p.u0);
        }
        mems::write_text(out_path(rc, "branch.svg"),
                         mems::svg_line_plot({s}, {"solution branch", "lambda", "u(r0)",
                                                   false, false}));
    }

    std::printf("swept %zu lambda values\n", points.size());
    return 0;
}

int cmd_asymptotics(const mems::run_config& rc, const double* lambda) {
    const mems::phi_operator op_variant = rc.build_operator();
    const auto* op = std::get_if<mems::power_monomial>(&op_variant);
    ordered_json j{{"config", config_echo(rc)}};
    if (!op) {
        std::cerr << "asymptotics requires the power monomial operator\n";
        return 1;
    }
    mems::asymptotic_constants k;
    try {
        k = mems::compute_constants(*op, mems::gap_function(mems::mems_power{rc.mdl.p}),
                                    rc.mdl.gamma, rc.mdl.C);
    } catch (const std::exception& e) {
        std::cerr << "asymptotics failed: " << e.what() << "\n";
        return 1;
    }
    j["theta"] = k.theta;
    j["sigma"] = k.sigma;
    j["kappa"] = k.kappa;
    j["exponent"] = k.exponent;
    j["A"] = k.A;
    j["q"] = k.q;
    j["C"] = k.C;
    if (lambda) {
        j["lambda_star"] = *lambda;
        j["coef"] = k.coef(*lambda);
    }
    write_json(out_path(rc, "asymptotics.json"), j);
    std::printf("theta %.17g sigma %.17g kappa %.17g exponent %.17g\n", k.theta, k.sigma,
                k.kappa, k.exponent);
    return 0;
}

struct shot_outcome {
    mems::asymptotic_constants k;
    mems::shooter_result res;
};

// shared by shoot and crosscheck; throws on failure
shot_outcome run_shot(const mems::run_config& rc, const mems::model& mdl) {
    const auto* op = std::get_if<mems::power_monomial>(&mdl.op);
    if (!op) throw std::domain_error("shooting requires the power monomial operator");
    shot_outcome out;
    out.k = mems::compute_constants(*op, mdl.gap, rc.mdl.gamma, rc.mdl.C);
    out.res = mems::shoot_backward(out.k, mdl.gap, mdl.src, shooter_setup(out.k, rc.num),
                                   rc.grid());
    return out;
}

int cmd_shoot(const mems::run_config& rc, bool force) {
    const mems::model mdl = rc.build_model();
    {
        const auto rep = mems::validate_hypotheses(mdl.op, mdl.gap, mdl.src);
        if (!rep.all_pass()) {
            for (const auto& c : rep.checks)
                if (c.applicable && !c.pass)
                    std::cerr << "hypothesis " << c.name << " failed: " << c.detail << "\n";
            if (!force) return 1;
            std::cerr << "continuing anyway (--force)\n";
        }
    }

    shot_outcome so;
    try {
        so = run_shot(rc, mdl);
    } catch (const std::exception& e) {
        std::cerr << "shoot failed: " << e.what() << "\n";
        return 1;
    }
    const auto& k = so.k;
    const auto& res = so.res;

    ordered_json j{{"config", config_echo(rc)}};
    j["constants"] = {{"theta", k.theta}, {"sigma", k.sigma}, {"kappa", k.kappa},
                      {"exponent", k.exponent}, {"A", k.A}, {"q", k.q}, {"C", k.C}};
    j["t_star"] = res.t_star;
    j["lambda_star"] = res.lambda_star;
    j["coef"] = k.coef(res.lambda_star);
    j["seed"] = {{"T_used", res.T_used}, {"seed_tail", res.seed_tail},
                 {"outer_passes", res.outer_passes}, {"dt", rc.num.dt},
                 {"crossings", res.crossings}};
    try {
        const auto fit = mems::fit_asymptotics(res.touchdown_profile);
        j["fit"] = {{"exponent_hat", fit.exponent_hat}, {"coef_hat", fit.coef_hat},
                    {"r2", fit.r2}, {"nodes_used", fit.nodes_used}};
    } catch (const std::exception& e) {
        j["fit"] = {{"error", e.what()}};
    }
    write_json(out_path(rc, "shoot.json"), j);

    mems::csv_table traj;
    traj.header = {"t", "v", "w"};
    for (const auto& s : res.trajectory)
        traj.add_row({mems::fmt17(s.t), mems::fmt17(s.v), mems::fmt17(s.w)});
    mems::write_csv(out_path(rc, "trajectory.csv"), traj);

    mems::csv_table prof;
    prof.header = {"r", "u"};
    const auto& tp = res.touchdown_profile;
    for (std::size_t i = 0; i < tp.grid.r.size(); ++i)
        prof.add_row({mems::fmt17(tp.grid.r[i]), mems::fmt17(tp.u[i])});
    mems::write_csv(out_path(rc, "touchdown.csv"), prof);

    if (rc.out.svg) {
        mems::svg_series computed, law;
        computed.label = "1 - u*(r)";
        law.label = "C r^k law";
        law.color = "#c0392b";
        const double coef = k.coef(res.lambda_star);
        for (std::size_t i = 0; i < tp.grid.r.size(); ++i) {
            const double r = tp.grid.r[i];
            if (r > 0.2) break;
            computed.x.push_back(r);
            computed.y.push_back(1.0 - tp.u[i]);
            law.x.push_back(r);
            law.y.push_back(coef * std::pow(r, k.exponent));
        }
        mems::write_text(out_path(rc, "shoot.svg"),
                         mems::svg_line_plot({computed, law},
                                             {"touchdown asymptotics", "r", "1 - u",
                                              true, true}));
    }

    std::printf("T* %.17g lambda* %.17g coef %.17g\n", res.t_star, res.lambda_star,
                k.coef(res.lambda_star));
    return 0;
}

int cmd_crosscheck(const mems::run_config& rc, double width, double threshold, bool force) {
    const mems::model mdl = rc.build_model();
    if (int rc_gate = solve_gate(mdl, force)) return rc_gate;

    mems::pull_in_estimate est;
    shot_outcome so;
    try {
        est = mems::bisect_pullin(mdl, width, std::numeric_limits<double>::infinity(),
                                  rc.grid(), rc.solver());
        so = run_shot(rc, mdl);
    } catch (const std::exception& e) {
        std::cerr << "crosscheck failed: " << e.what() << "\n";
        return 1;
    }

    const double mid = 0.5 * (est.bracket_lo + est.bracket_hi);
    const double disc = std::fabs(mid - so.res.lambda_star) / so.res.lambda_star;
    const bool pass = disc <= threshold;

    write_json(out_path(rc, "crosscheck.json"),
               {{"config", config_echo(rc)},
                {"width", width},
                {"threshold", threshold},
                {"pullin",
                 {{"lower", est.lower},
                  {"upper", est.upper},
                  {"bracket_lo", est.bracket_lo},
                  {"bracket_hi", est.bracket_hi},
                  {"low_confidence", est.low_confidence}}},
                {"shoot", {{"t_star", so.res.t_star}, {"lambda_star", so.res.lambda_star}}},
                {"lambda_bisect_mid", mid},
                {"discrepancy", disc},
                {"pass", pass}});

    std::printf("bisect mid %.8g vs shot %.8g: discrepancy %.4g (threshold %.4g) %s\n", mid,
                so.res.lambda_star, disc, threshold, pass ? "pass" : "FAIL");
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasilinear MEMS membrane: minimal solutions, pull-in voltage, touchdown"};
    app.require_subcommand(1);

    std::string config_path, out_override, lambdas_text;
    double lambda = 0.0, width = 1e-3, threshold = 0.02;
    int jobs = 1;
    bool svg = false, force = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "model configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_override, "output directory override");
        sub->add_flag("--svg", svg, "emit SVG plots");
    };

    auto* c_validate = app.add_subcommand("validate", "check the standing hypotheses");
    add_common(c_validate);

    auto* c_solve = app.add_subcommand("solve", "minimal solution at a fixed lambda");
    add_common(c_solve);
    c_solve->add_option("--lambda", lambda, "voltage parameter")
        ->required()
        ->check(CLI::NonNegativeNumber);
    c_solve->add_flag("--force", force, "skip the hypothesis gate");

    auto* c_pullin = app.add_subcommand("pullin", "bracket the pull-in voltage");
    add_common(c_pullin);
    c_pullin->add_option("--width", width, "bracket width target")->check(CLI::PositiveNumber);
    c_pullin->add_flag("--force", force, "skip the hypothesis gate");

    auto* c_branch = app.add_subcommand("branch", "sweep lambda for the solution branch");
    add_common(c_branch);
    auto* lambdas_opt = c_branch->add_option(
        "--lambdas", lambdas_text, "comma list or lo:hi:count; default 0 to bracket top");
    c_branch->add_option("--width", width, "bracket width for the default sweep")
        ->check(CLI::PositiveNumber);
    c_branch->add_option("--jobs", jobs, "concurrent solves")->check(CLI::PositiveNumber);
    c_branch->add_flag("--force", force, "skip the hypothesis gate");

    auto* c_asym = app.add_subcommand("asymptotics", "touchdown expansion constants");
    add_common(c_asym);
    auto* asym_lambda = c_asym->add_option("--lambda", lambda, "evaluate the coefficient at this lambda*")
                            ->check(CLI::PositiveNumber);

    auto* c_shoot = app.add_subcommand("shoot", "backward shot for lambda* and the touchdown profile");
    add_common(c_shoot);
    c_shoot->add_flag("--force", force, "skip the hypothesis gate");

    auto* c_cross = app.add_subcommand("crosscheck", "bisection bracket vs shooter lambda*");
    add_common(c_cross);
    c_cross->add_option("--width", width, "bracket width target")->check(CLI::PositiveNumber);
    c_cross->add_option("--threshold", threshold, "relative discrepancy allowed")
        ->check(CLI::PositiveNumber);
    c_cross->add_flag("--force", force, "skip the hypothesis gate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    mems::run_config rc;
    try {
        rc = mems::load_config(config_path);
    } catch (const mems::config_parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (!out_override.empty()) rc.out.dir = out_override;
    rc.out.svg = rc.out.svg || svg;

    try {
        mems::ensure_dir(rc.out.dir);
        if (app.got_subcommand(c_validate)) return cmd_validate(rc);
        if (app.got_subcommand(c_solve)) return cmd_solve(rc, lambda, force);
        if (app.got_subcommand(c_pullin)) return cmd_pullin(rc, width, force);
        if (app.got_subcommand(c_branch))
            return cmd_branch(rc, lambdas_text, lambdas_opt->count() > 0, width, jobs, force);
        if (app.got_subcommand(c_asym))
            return cmd_asymptotics(rc, asym_lambda->count() > 0 ? &lambda : nullptr);
        if (app.got_subcommand(c_shoot)) return cmd_shoot(rc, force);
        if (app.got_subcommand(c_cross)) return cmd_crosscheck(rc, width, threshold, force);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
